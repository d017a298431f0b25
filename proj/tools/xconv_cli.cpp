// Command-line surface for the adaptive filtering engine.
//
// Exit codes: 0 success, 1 numerical-contract violation (oracle-check above
// tolerance), 2 parameter error, 3 I/O error.

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>
#include <json.hpp>
#include <random>
#include <xconv/xconv.hpp>

using namespace xconv;
using nlohmann::json;

namespace {

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

Field2d load_image(const std::string& path) {
  if (ends_with(path, ".pgm")) return read_pgm<double>(path);
  if (ends_with(path, ".pfm")) return read_pfm_field<double>(path);
  throw IoError("unsupported image format (want .pgm or .pfm): " + path);
}

/// Writes .pfm as raw floats; .pgm min-max normalized to 8 bits with the
/// mapping recorded in the sidecar.
void save_image(const std::string& path, const Field2d& f, json& sidecar) {
  if (ends_with(path, ".pfm")) {
    write_pfm(path, f);
    return;
  }
  if (!ends_with(path, ".pgm"))
    throw IoError("unsupported output format (want .pgm or .pfm): " + path);
  const RGrid<double> re = f.real_part();
  const double lo = re.minCoeff(), hi = re.maxCoeff();
  Field2d norm(f.width(), f.height());
  if (hi > lo)
    norm.values = ((re - lo) / (hi - lo)).cast<Cx<double>>();
  sidecar["normalization"] = {{"min", lo}, {"max", hi}, {"maxval", 255}};
  write_pgm(path, norm);
}

void write_sidecar(const std::string& image_path, const json& sidecar) {
  const std::string path = image_path + ".json";
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << sidecar.dump(2) << "\n";
  if (!out) throw IoError("write failed: " + path);
}

XformKind parse_group(const std::string& g) {
  if (g == "rotation") return XformKind::rotation2;
  if (g == "scale") return XformKind::scale2;
  if (g == "rotation3d") return XformKind::rotation3;
  throw std::invalid_argument("--group must be rotation, scale, or rotation3d");
}

json seconds_json(const std::map<std::string, double>& s) {
  json j = json::object();
  for (const auto& [k, v] : s) j[k] = v;
  return j;
}

// --- deterministic fixture generators (oracle-check without input files) ----

Field2d random_field(int w, int h, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Field2d f(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) f.at(x, y) = u(rng);
  return f;
}

Field2d random_smooth_filter(int radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  struct Bump {
    double x, y, a, s;
  };
  std::vector<Bump> bumps;
  for (int i = 0; i < 6; ++i)
    bumps.push_back({u(rng) * radius * 0.5, u(rng) * radius * 0.5, u(rng),
                     1.2 + 0.8 * std::abs(u(rng))});
  const double env = 0.35 * radius;
  Field2d f(2 * radius + 1, 2 * radius + 1);
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x) {
      double v = 0;
      for (const auto& b : bumps) {
        const double dx = x - b.x, dy = y - b.y;
        v += b.a * std::exp(-(dx * dx + dy * dy) / (2 * b.s * b.s));
      }
      f.at(x + radius, y + radius) =
          v * std::exp(-(double(x) * x + double(y) * y) / (2 * env * env));
    }
  return f;
}

/// Ring confined to the middle of the scale band, so steering by scales in
/// [0.5, 2] stays inside the representable log-periodic class.
Field2d annular_filter(int radius, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  const double r0 = 0.354 * radius, sr = 0.044 * radius;
  const double a1 = u(rng), b1 = u(rng), a2 = 0.5 * u(rng);
  Field2d f(2 * radius + 1, 2 * radius + 1);
  for (int y = -radius; y <= radius; ++y)
    for (int x = -radius; x <= radius; ++x) {
      const double r = std::hypot(double(x), double(y));
      const double th = std::atan2(double(y), double(x));
      f.at(x + radius, y + radius) =
          std::exp(-(r - r0) * (r - r0) / (2 * sr * sr)) *
          (1.0 + 0.6 * (a1 * std::cos(th) + b1 * std::sin(th)) +
           0.4 * a2 * std::cos(2 * th));
    }
  return f;
}

XformFieldd random_xform(XformKind kind, int w, int h, std::mt19937_64& rng) {
  if (kind == XformKind::rotation2) {
    std::uniform_real_distribution<double> u(-double(EIGEN_PI), double(EIGEN_PI));
    RGrid<double> a(h, w);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) a(y, x) = u(rng);
    return XformFieldd::rotation(a);
  }
  std::uniform_real_distribution<double> u(std::log(0.5), std::log(2.0));
  RGrid<double> s(h, w);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) s(y, x) = std::exp(u(rng));
  return XformFieldd::scaling(s);
}

// --- descriptor CSV dump (one row per keypoint) -----------------------------
//
// Format: x,y,eps,degenerate,len,v0,...,v{len-1}

void write_descriptors_csv(const std::string& path,
                           const std::vector<ECDescriptord>& ds) {
  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out.precision(17);
  for (const auto& d : ds) {
    out << d.x << "," << d.y << "," << d.eps << "," << (d.degenerate ? 1 : 0)
        << "," << d.length();
    for (int i = 0; i < d.length(); ++i) out << "," << d.values(i);
    out << "\n";
  }
  if (!out) throw IoError("write failed: " + path);
}

std::vector<ECDescriptord> read_descriptors_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::vector<ECDescriptord> out;
  std::string line;
  int row = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::vector<double> vals;
    std::string tok;
    while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
    if (vals.size() < 5 || vals.size() != 5 + size_t(vals[4]))
      throw IoError(path + ": malformed descriptor row " + std::to_string(row));
    ECDescriptord d;
    d.x = vals[0];
    d.y = vals[1];
    d.eps = vals[2];
    d.degenerate = vals[3] != 0;
    const int len = static_cast<int>(vals[4]);
    d.values.resize(len);
    for (int i = 0; i < len; ++i) d.values(i) = vals[5 + i];
    out.push_back(std::move(d));
  }
  return out;
}

/// Rotate a 3D filter by mixing each degree's coefficients per radial shell.
SphFilter3d steer_filter3(const SphFilter3d& F, const Eigen::Quaterniond& q) {
  SphFilter3d out = F;
  for (int l = 0; l <= F.K; ++l) {
    const auto D = wigner_d(l, q);
    for (int j = 0; j < F.n_radii; ++j) {
      Eigen::VectorXcd c(2 * l + 1);
      for (int m = -l; m <= l; ++m) c(m + l) = F.coeff(j, l, m);
      const Eigen::VectorXcd cr = D.D * c;
      for (int m = -l; m <= l; ++m) out.coeffs(j, l * (l + 1) + m) = cr(m + l);
    }
  }
  return out;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{
      "Spatially-adaptive filtering: extended correlation/convolution with "
      "per-pixel rotated or scaled filters, plus detection, descriptor, "
      "contour-matching, smoothing, and line-integral-convolution tools.\n"
      "Images are .pgm (8/16-bit) or .pfm (float; two planes = complex).\n"
      "Transformation fields are .pfm: one plane of angles (rotation, radians) "
      "or scale factors (scale), four planes w,x,y,z (rotation3d).\n"
      "Decomposed filters use the XCF1 binary container.\n"
      "8-bit outputs are min-max normalized; the mapping, parameters, timings "
      "and counters go to a <output>.json sidecar."};
  app.require_subcommand(1);
  app.fallthrough();
  uint64_t seed = 0;
  int threads = 1;
  app.add_option("--seed", seed, "Seed for all randomness (default 0)")
      ->capture_default_str();
  app.add_option("--threads", threads,
                 "Accepted for interface stability; execution is sequential "
                 "and outputs are independent of this value (default 1)")
      ->capture_default_str();

  int exit_code = 0;

  // ---- xcorr / xconv -------------------------------------------------------
  struct EngineArgs {
    std::string signal, xform, filter, output, group = "rotation";
    std::string method = "fast";
  };
  auto engine_args = std::make_shared<EngineArgs>();
  auto add_engine = [&](const std::string& name, const std::string& desc) {
    CLI::App* c = app.add_subcommand(name, desc);
    c->add_option("--signal", engine_args->signal, "Input image (.pgm/.pfm)")
        ->required();
    c->add_option("--xform", engine_args->xform,
                  "Per-pixel transformation field (.pfm)")
        ->required();
    c->add_option("--filter", engine_args->filter,
                  "Decomposed filter container (XCF1)")
        ->required();
    c->add_option("--group", engine_args->group,
                  "Transformation group: rotation or scale (default rotation)")
        ->capture_default_str();
    c->add_option("--method", engine_args->method,
                  "fast (FFT pipeline) or brute (dense oracle; default fast)")
        ->check(CLI::IsMember({"fast", "brute"}))
        ->capture_default_str();
    c->add_option("--output", engine_args->output, "Output image (.pgm/.pfm)")
        ->required();
    return c;
  };
  auto run_engine = [&](bool correlate) {
    const auto& a = *engine_args;
    const XformKind kind = parse_group(a.group);
    if (kind == XformKind::rotation3)
      throw std::invalid_argument("--group rotation3d: use the steer3d subcommand");
    Field2d H = load_image(a.signal);
    XformFieldd T = read_xform<double>(a.xform, kind);
    FreqFilter2d F = read_filter<double>(a.filter);
    if (F.group != kind)
      throw std::invalid_argument("--filter " + a.filter +
                                  " was decomposed for a different group");
    Timer t;
    Response2<double> r;
    if (a.method == "brute")
      r = correlate ? xcorr_brute(H, T, F) : xconv_brute(H, T, F);
    else
      r = correlate ? xcorr_fast(H, T, F) : xconv_fast(H, T, F);
    json sidecar = {{"command", correlate ? "xcorr" : "xconv"},
                    {"parameters",
                     {{"signal", a.signal},
                      {"xform", a.xform},
                      {"filter", a.filter},
                      {"group", a.group},
                      {"method", a.method},
                      {"seed", seed},
                      {"threads", threads}}},
                    {"counters",
                     {{"standard-convolutions", r.standard_ops},
                      {"components", F.n_components()}}},
                    {"timings", seconds_json(r.seconds)}};
    sidecar["timings"]["total"] = t.seconds();
    save_image(a.output, r.output, sidecar);
    write_sidecar(a.output, sidecar);
  };
  add_engine("xcorr",
             "Extended correlation: gather with the per-pixel transformed filter")
      ->callback([&] { run_engine(true); });
  add_engine("xconv",
             "Extended convolution: scatter with the per-pixel transformed filter")
      ->callback([&] { run_engine(false); });

  // ---- smooth --------------------------------------------------------------
  {
    auto a = std::make_shared<EngineArgs>();
    bool unnormalized = false;
    auto* c = app.add_subcommand(
        "smooth",
        "Normalized adaptive smoothing: extended convolution of the signal "
        "divided by that of an all-ones image");
    c->add_option("--signal", a->signal, "Input image (.pgm/.pfm)")->required();
    c->add_option("--xform", a->xform, "Transformation field (.pfm)")->required();
    c->add_option("--filter", a->filter, "Decomposed filter container (XCF1)")
        ->required();
    c->add_option("--group", a->group,
                  "rotation or scale (default rotation)")
        ->capture_default_str();
    c->add_flag("--unnormalized", unnormalized,
                "Skip the per-pixel signal weighting (scale group); shows blur "
                "bleeding at scale discontinuities");
    c->add_option("--output", a->output, "Output image (.pgm/.pfm)")->required();
    c->callback([&, a] {
      const XformKind kind = parse_group(a->group);
      Field2d H = load_image(a->signal);
      XformFieldd T = read_xform<double>(a->xform, kind);
      FreqFilter2d F = read_filter<double>(a->filter);
      if (F.group != kind)
        throw std::invalid_argument("--filter " + a->filter +
                                    " was decomposed for a different group");
      Timer t;
      auto r = smooth_adaptive(H, T, F, !unnormalized);
      json sidecar = {{"command", "smooth"},
                      {"parameters",
                       {{"signal", a->signal},
                        {"xform", a->xform},
                        {"filter", a->filter},
                        {"group", a->group},
                        {"unnormalized", unnormalized},
                        {"seed", seed},
                        {"threads", threads}}},
                      {"counters",
                       {{"standard-convolutions", r.standard_ops},
                        {"clamped-pixels", r.clamped_pixels}}},
                      {"timings", {{"total", t.seconds()}}}};
      save_image(a->output, r.output, sidecar);
      write_sidecar(a->output, sidecar);
    });
  }

  // ---- detect --------------------------------------------------------------
  {
    struct Args {
      std::string image, pattern, output, peaks_csv;
      double cx = -1, cy = -1, eps = 0;
      int K = 16;
    };
    auto a = std::make_shared<Args>();
    auto* c = app.add_subcommand(
        "detect",
        "Pattern detection: gradient magnitudes vote through the pattern's "
        "optimal filter, steered by gradient directions");
    c->add_option("--image", a->image, "Scene image (.pgm/.pfm)")->required();
    c->add_option("--pattern", a->pattern, "Pattern image (.pgm/.pfm)")->required();
    c->add_option("--center-x", a->cx, "Pattern center x (default image center)");
    c->add_option("--center-y", a->cy, "Pattern center y (default image center)");
    c->add_option("--eps", a->eps,
                  "Support radius in pixels (default: half the pattern size)");
    c->add_option("--K", a->K, "Angular band limit (default 16)")
        ->capture_default_str();
    c->add_option("--output", a->output, "Vote-response image (.pgm/.pfm)")
        ->required();
    c->add_option("--peaks-csv", a->peaks_csv,
                  "Optional CSV of detected peaks: x,y,value");
    c->callback([&, a] {
      Field2d img = load_image(a->image);
      Field2d pat = load_image(a->pattern);
      const double cx = a->cx >= 0 ? a->cx : (pat.width() - 1) / 2.0;
      const double cy = a->cy >= 0 ? a->cy : (pat.height() - 1) / 2.0;
      const double eps =
          a->eps > 0 ? a->eps : std::min(pat.width(), pat.height()) / 2.0;
      Timer t;
      VoteFilterd vf = build_optimal_filter(pat, cx, cy, eps);
      auto det = detect_pattern(img, vf, a->K);
      json peaks = json::array();
      for (const auto& p : det.peaks)
        peaks.push_back({{"x", p.x}, {"y", p.y}, {"value", p.value}});
      json sidecar = {{"command", "detect"},
                      {"parameters",
                       {{"image", a->image},
                        {"pattern", a->pattern},
                        {"center-x", cx},
                        {"center-y", cy},
                        {"eps", eps},
                        {"K", a->K},
                        {"seed", seed},
                        {"threads", threads}}},
                      {"counters",
                       {{"standard-convolutions", det.standard_ops},
                        {"peaks", det.peaks.size()}}},
                      {"peaks", peaks},
                      {"timings", {{"total", t.seconds()}}}};
      save_image(a->output, det.response, sidecar);
      write_sidecar(a->output, sidecar);
      if (!a->peaks_csv.empty()) {
        std::ofstream out(a->peaks_csv);
        if (!out) throw IoError("cannot open " + a->peaks_csv + " for writing");
        for (const auto& p : det.peaks)
          out << p.x << "," << p.y << "," << p.value << "\n";
      }
    });
  }

  // ---- ecd -----------------------------------------------------------------
  {
    struct Args {
      std::string image, keypoints, output_csv, output_pfm;
      double eps = 7.0;
    };
    auto a = std::make_shared<Args>();
    auto* c = app.add_subcommand(
        "ecd",
        "Rotation-invariant local descriptors at the given keypoints "
        "(CSV rows x,y,scale; scale > 0 overrides --eps)");
    c->add_option("--image", a->image, "Input image (.pgm/.pfm)")->required();
    c->add_option("--keypoints", a->keypoints, "Keypoint CSV (x,y,scale)")
        ->required();
    c->add_option("--eps", a->eps, "Default support radius (default 7)")
        ->capture_default_str();
    c->add_option("--output-csv", a->output_csv,
                  "Descriptor dump: x,y,eps,degenerate,len,values...")
        ->required();
    c->add_option("--output-pfm", a->output_pfm,
                  "Optional PFM stack: one plane per descriptor, reshaped to "
                  "its (2R+1)^2 grid (all keypoints must share one radius)");
    c->callback([&, a] {
      Field2d img = load_image(a->image);
      auto kps = read_keypoints_csv<double>(a->keypoints);
      Timer t;
      std::vector<ECDescriptord> ds;
      int degenerate = 0;
      for (const auto& k : kps) {
        const double eps = k(2) > 0 ? k(2) : a->eps;
        ds.push_back(ecd(img, k(0), k(1), eps));
        degenerate += ds.back().degenerate ? 1 : 0;
      }
      write_descriptors_csv(a->output_csv, ds);
      if (!a->output_pfm.empty()) {
        std::vector<RGrid<double>> planes;
        for (const auto& d : ds) {
          const int side = static_cast<int>(std::lround(std::sqrt(d.length())));
          if (side * side != d.length() ||
              (!planes.empty() && side != planes[0].rows()))
            throw std::invalid_argument(
                "--output-pfm needs a single shared support radius");
          RGrid<double> p(side, side);
          for (int y = 0; y < side; ++y)
            for (int x = 0; x < side; ++x) p(y, x) = d.values(y * side + x);
          planes.push_back(std::move(p));
        }
        write_pfm_planes(a->output_pfm, planes);
      }
      json sidecar = {{"command", "ecd"},
                      {"parameters",
                       {{"image", a->image},
                        {"keypoints", a->keypoints},
                        {"eps", a->eps},
                        {"seed", seed},
                        {"threads", threads}}},
                      {"counters",
                       {{"descriptors", ds.size()}, {"degenerate", degenerate}}},
                      {"timings", {{"total", t.seconds()}}}};
      write_sidecar(a->output_csv, sidecar);
    });
  }

  // ---- match ---------------------------------------------------------------
  {
    struct Args {
      std::string scene, models, truth, output;
    };
    auto a = std::make_shared<Args>();
    auto* c = app.add_subcommand(
        "match",
        "Precision/recall of descriptor matching by ascending distance. "
        "Ground truth CSV rows: scene_index,model_index");
    c->add_option("--scene", a->scene, "Scene descriptor CSV (from ecd)")
        ->required();
    c->add_option("--models", a->models, "Model descriptor CSV (from ecd)")
        ->required();
    c->add_option("--truth", a->truth, "Ground-truth pair CSV")->required();
    c->add_option("--output", a->output, "Output CSV: rank,precision,recall")
        ->required();
    c->callback([&, a] {
      auto scene = read_descriptors_csv(a->scene);
      auto models = read_descriptors_csv(a->models);
      auto pairs = read_pairs_csv(a->truth);
      std::vector<std::vector<int>> truth(scene.size());
      for (const auto& [s, m] : pairs) {
        if (s < 0 || s >= int(scene.size()))
          throw std::invalid_argument("--truth names scene index " +
                                      std::to_string(s) + " out of range");
        if (m < 0 || m >= int(models.size()))
          throw std::invalid_argument("--truth names model index " +
                                      std::to_string(m) + " out of range");
        truth[s].push_back(m);
      }
      Timer t;
      auto curves = match_descriptors(scene, models, truth);
      std::ofstream out(a->output);
      if (!out) throw IoError("cannot open " + a->output + " for writing");
      out.precision(17);
      for (size_t r = 0; r < curves.precision.size(); ++r)
        out << r + 1 << "," << curves.precision[r] << "," << curves.recall[r]
            << "\n";
      json sidecar = {{"command", "match"},
                      {"parameters",
                       {{"scene", a->scene},
                        {"models", a->models},
                        {"truth", a->truth},
                        {"seed", seed},
                        {"threads", threads}}},
                      {"counters",
                       {{"evaluated", curves.evaluated},
                        {"skipped", curves.skipped}}},
                      {"timings", {{"total", t.seconds()}}}};
      write_sidecar(a->output, sidecar);
    });
  }

  // ---- contour -------------------------------------------------------------
  {
    struct Args {
      std::string query, target, output;
      double qx = 0, qy = 0, eps = 8, sigma = 1.5;
      int K = 16, width = 0, height = 0, top = 9;
    };
    auto a = std::make_shared<Args>();
    auto* c = app.add_subcommand(
        "contour",
        "Complement matching of contour fragments: a vote filter built from "
        "the query region with negated normals is scattered over the target; "
        "top peaks get a refined rotation. Contour CSVs hold x,y rows, blank "
        "lines separating polylines");
    c->add_option("--query", a->query, "Query contour CSV")->required();
    c->add_option("--target", a->target, "Target contour CSV")->required();
    c->add_option("--query-x", a->qx, "Query region center x")->required();
    c->add_option("--query-y", a->qy, "Query region center y")->required();
    c->add_option("--eps", a->eps, "Region radius in pixels (default 8)")
        ->capture_default_str();
    c->add_option("--K", a->K, "Angular band limit (default 16)")
        ->capture_default_str();
    c->add_option("--width", a->width, "Canvas width (default: fit contours)");
    c->add_option("--height", a->height, "Canvas height (default: fit contours)");
    c->add_option("--sigma", a->sigma,
                  "Rasterization blur in pixels (default 1.5)")
        ->capture_default_str();
    c->add_option("--top", a->top, "Candidates to refine (default 9)")
        ->capture_default_str();
    c->add_option("--output", a->output, "Match CSV: x,y,angle,score")->required();
    c->callback([&, a] {
      auto qlines = read_polylines_csv<double>(a->query);
      auto tlines = read_polylines_csv<double>(a->target);
      int w = a->width, h = a->height;
      if (w <= 0 || h <= 0) {
        double mx = 0, my = 0;
        for (const auto& lines : {qlines, tlines})
          for (const auto& l : lines)
            for (const auto& p : l) {
              mx = std::max(mx, p.x());
              my = std::max(my, p.y());
            }
        if (w <= 0) w = static_cast<int>(std::ceil(mx)) + 8;
        if (h <= 0) h = static_cast<int>(std::ceil(my)) + 8;
      }
      Timer t;
      ContourScened query = rasterize_contours(qlines, w, h, a->sigma);
      ContourScened target = rasterize_contours(tlines, w, h, a->sigma);
      auto matches =
          match_contours(query, target, a->qx, a->qy, a->eps, a->K, a->top);
      std::ofstream out(a->output);
      if (!out) throw IoError("cannot open " + a->output + " for writing");
      out.precision(17);
      for (const auto& m : matches)
        out << m.x << "," << m.y << "," << m.angle << "," << m.score << "\n";
      json sidecar = {{"command", "contour"},
                      {"parameters",
                       {{"query", a->query},
                        {"target", a->target},
                        {"query-x", a->qx},
                        {"query-y", a->qy},
                        {"eps", a->eps},
                        {"K", a->K},
                        {"width", w},
                        {"height", h},
                        {"sigma", a->sigma},
                        {"top", a->top},
                        {"seed", seed},
                        {"threads", threads}}},
                      {"counters", {{"matches", matches.size()}}},
                      {"timings", {{"total", t.seconds()}}}};
      write_sidecar(a->output, sidecar);
    });
  }

  // ---- lic -----------------------------------------------------------------
  {
    struct Args {
      std::string field, output;
      double length = 8.0, line_width = 1.2;
      int K = 16;
      bool unnormalized = false;
    };
    auto a = std::make_shared<Args>();
    auto* c = app.add_subcommand(
        "lic",
        "Line integral convolution: seeded white noise smeared along a "
        "rotation field with an anisotropic Gaussian");
    c->add_option("--field", a->field, "Rotation field (.pfm, one angle plane)")
        ->required();
    c->add_option("--length", a->length, "Streak length (default 8)")
        ->capture_default_str();
    c->add_option("--line-width", a->line_width, "Streak width (default 1.2)")
        ->capture_default_str();
    c->add_option("--K", a->K, "Angular band limit (default 16)")
        ->capture_default_str();
    c->add_flag("--unnormalized", a->unnormalized,
                "Skip the normalized-smoothing division");
    c->add_option("--output", a->output, "Output image (.pgm/.pfm)")->required();
    c->callback([&, a] {
      XformFieldd T = read_xform<double>(a->field, XformKind::rotation2);
      Timer t;
      Field2d out =
          lic(T, a->length, a->line_width, seed, !a->unnormalized, a->K);
      json sidecar = {{"command", "lic"},
                      {"parameters",
                       {{"field", a->field},
                        {"length", a->length},
                        {"line-width", a->line_width},
                        {"K", a->K},
                        {"unnormalized", a->unnormalized},
                        {"seed", seed},
                        {"threads", threads}}},
                      {"timings", {{"total", t.seconds()}}}};
      save_image(a->output, out, sidecar);
      write_sidecar(a->output, sidecar);
    });
  }

  // ---- steer3d -------------------------------------------------------------
  {
    struct Args {
      std::string filter, output;
      std::vector<double> quat{1, 0, 0, 0};
    };
    auto a = std::make_shared<Args>();
    auto* c = app.add_subcommand(
        "steer3d",
        "Rotate a 3D decomposed filter by a quaternion (per-degree coefficient "
        "mixing) and write the reconstruction as a PFM stack of z slices");
    c->add_option("--filter", a->filter, "3D filter container (XCF1)")->required();
    c->add_option("--quat", a->quat,
                  "Rotation quaternion w x y z (default 1 0 0 0)")
        ->expected(4);
    c->add_option("--output", a->output, "Output PFM stack")->required();
    c->callback([&, a] {
      SphFilter3d F = read_filter3<double>(a->filter);
      Eigen::Quaterniond q(a->quat[0], a->quat[1], a->quat[2], a->quat[3]);
      if (q.norm() < 1e-12)
        throw std::invalid_argument("--quat must be a nonzero quaternion");
      q.normalize();
      Timer t;
      SphFilter3d rotated = steer_filter3(F, q);
      const int R = static_cast<int>(std::ceil(F.r_max));
      const int n = 2 * R + 1;
      Field3d vol = reconstruct3(rotated, n, n, n, double(R), double(R), double(R));
      std::vector<RGrid<double>> planes;
      for (int z = 0; z < n; ++z) {
        RGrid<double> p(n, n);
        for (int y = 0; y < n; ++y)
          for (int x = 0; x < n; ++x) p(y, x) = vol.at(x, y, z).real();
        planes.push_back(std::move(p));
      }
      write_pfm_planes(a->output, planes);
      long long comps = 0;
      for (int l = 0; l <= F.K; ++l) comps += (2 * l + 1) * (2 * l + 1);
      json sidecar = {{"command", "steer3d"},
                      {"parameters",
                       {{"filter", a->filter},
                        {"quat", a->quat},
                        {"seed", seed},
                        {"threads", threads}}},
                      {"counters",
                       {{"degrees", F.K + 1}, {"steering-products", comps}}},
                      {"timings", {{"total", t.seconds()}}}};
      write_sidecar(a->output, sidecar);
    });
  }

  // ---- decompose -----------------------------------------------------------
  {
    struct Args {
      std::string input, output, group = "rotation", components_pfm, recon;
      double cx = -1, cy = -1, r_min = 1.0, r_max = 0, r_domain = 0;
      int K = 16, n_radii = 0, n_angles = 0;
    };
    auto a = std::make_shared<Args>();
    auto* c = app.add_subcommand(
        "decompose",
        "Decompose a filter image into steerable components and write the "
        "XCF1 container");
    c->add_option("--input", a->input,
                  "Filter image (.pgm/.pfm); for rotation3d a PFM stack of "
                  "z slices")
        ->required();
    c->add_option("--group", a->group,
                  "rotation, scale, or rotation3d (default rotation)")
        ->capture_default_str();
    c->add_option("--K", a->K,
                  "Band limit; retains 2*floor(K/2)+1 components (default 16)")
        ->capture_default_str();
    c->add_option("--center-x", a->cx, "Filter center x (default image center)");
    c->add_option("--center-y", a->cy, "Filter center y (default image center)");
    c->add_option("--n-radii", a->n_radii,
                  "Radial samples (default 2*ceil(r_max))");
    c->add_option("--n-angles", a->n_angles,
                  "Angular samples (default max(32, 2K+1))");
    c->add_option("--r-min", a->r_min,
                  "Scale group: inner radius of the log-radial band (default 1)")
        ->capture_default_str();
    c->add_option("--r-max", a->r_max, "Support radius (default: fit the image)");
    c->add_option("--r-domain", a->r_domain,
                  "Scale group: log-period top, >= r-max; padding with zeros "
                  "delays wraparound of downscaled content (default r-max)");
    c->add_option("--output", a->output, "Output filter container (XCF1)")
        ->required();
    c->add_option("--components-pfm", a->components_pfm,
                  "Optional PFM stack of rendered components (real and "
                  "imaginary plane per component)");
    c->add_option("--recon", a->recon,
                  "Optional reconstruction image (.pgm/.pfm)");
    c->callback([&, a] {
      if (parse_group(a->group) == XformKind::rotation3) {
        auto planes = read_pfm_planes<double>(a->input);
        const int nz = static_cast<int>(planes.size());
        const int h = static_cast<int>(planes[0].rows());
        const int w = static_cast<int>(planes[0].cols());
        Field3d vol(w, h, nz);
        for (int z = 0; z < nz; ++z)
          for (int y = 0; y < h; ++y)
            for (int x = 0; x < w; ++x) vol.at(x, y, z) = planes[z](y, x);
        const double cx = a->cx >= 0 ? a->cx : (w - 1) / 2.0;
        const double cy = a->cy >= 0 ? a->cy : (h - 1) / 2.0;
        const double cz = (nz - 1) / 2.0;
        const double r_max =
            a->r_max > 0 ? a->r_max
                         : std::min({cx, cy, cz, w - 1 - cx, h - 1 - cy,
                                     nz - 1 - cz});
        if (r_max <= 0)
          throw std::invalid_argument("--r-max must be positive (volume too small?)");
        const int n_radii = a->n_radii > 0
                                ? a->n_radii
                                : 2 * static_cast<int>(std::ceil(r_max));
        Timer t;
        SphFilter3d F = decompose_rotation3(vol, cx, cy, cz, a->K, n_radii, r_max);
        write_filter3(a->output, F);
        long long comps = 0;
        for (int l = 0; l <= F.K; ++l) comps += (2 * l + 1) * (2 * l + 1);
        json sidecar = {{"command", "decompose"},
                        {"parameters",
                         {{"input", a->input},
                          {"group", a->group},
                          {"K", a->K},
                          {"center-x", cx},
                          {"center-y", cy},
                          {"center-z", cz},
                          {"n-radii", n_radii},
                          {"r-max", r_max},
                          {"seed", seed},
                          {"threads", threads}}},
                        {"counters", {{"steering-products", comps}}},
                        {"timings", {{"total", t.seconds()}}}};
        write_sidecar(a->output, sidecar);
        return;
      }
      Field2d img = load_image(a->input);
      const double cx = a->cx >= 0 ? a->cx : (img.width() - 1) / 2.0;
      const double cy = a->cy >= 0 ? a->cy : (img.height() - 1) / 2.0;
      const double r_max =
          a->r_max > 0
              ? a->r_max
              : std::min({cx, cy, img.width() - 1 - cx, img.height() - 1 - cy});
      if (r_max <= 0)
        throw std::invalid_argument("--r-max must be positive (image too small?)");
      const int n_radii =
          a->n_radii > 0 ? a->n_radii : 2 * static_cast<int>(std::ceil(r_max));
      int n_angles = a->n_angles > 0 ? a->n_angles : std::max(32, 2 * a->K + 2);
      n_angles += n_angles % 2;
      Timer t;
      FreqFilter2d F;
      if (parse_group(a->group) == XformKind::rotation2)
        F = decompose_rotation2(img, cx, cy, a->K, n_radii, n_angles, r_max);
      else
        F = decompose_scale2(img, cx, cy, a->K, n_radii, n_angles, a->r_min,
                             r_max, a->r_domain);
      write_filter(a->output, F);
      const int R = static_cast<int>(std::ceil(F.r_max));
      if (!a->components_pfm.empty()) {
        std::vector<RGrid<double>> planes;
        for (int ci = 0; ci < F.n_components(); ++ci) {
          Field2d comp =
              render_component(F, ci, 2 * R + 1, 2 * R + 1, double(R), double(R));
          planes.emplace_back(comp.real_part());
          planes.emplace_back(comp.values.imag());
        }
        write_pfm_planes(a->components_pfm, planes);
      }
      json sidecar = {{"command", "decompose"},
                      {"parameters",
                       {{"input", a->input},
                        {"group", a->group},
                        {"K", a->K},
                        {"center-x", cx},
                        {"center-y", cy},
                        {"n-radii", n_radii},
                        {"n-angles", n_angles},
                        {"r-min", a->r_min},
                        {"r-max", r_max},
                        {"r-domain", F.domain_top()},
                        {"seed", seed},
                        {"threads", threads}}},
                      {"counters", {{"components", F.n_components()}}},
                      {"timings", {{"total", t.seconds()}}}};
      if (!a->recon.empty()) {
        Field2d recon =
            reconstruct(F, 2 * R + 1, 2 * R + 1, double(R), double(R));
        save_image(a->recon, recon, sidecar);
      }
      write_sidecar(a->output, sidecar);
    });
  }

  // ---- oracle-check --------------------------------------------------------
  {
    struct Args {
      std::string group = "rotation", signal, xform, filter;
      int size = 24, radius = 6, K = 0;
      double tolerance = 3e-3;
    };
    auto a = std::make_shared<Args>();
    auto* c = app.add_subcommand(
        "oracle-check",
        "Run the fast FFT pipeline against the dense brute-force oracle on "
        "supplied or generated inputs; prints the max relative error and "
        "convolution counts, exits 1 above tolerance");
    c->add_option("--group", a->group, "rotation or scale (default rotation)")
        ->capture_default_str();
    c->add_option("--size", a->size, "Generated signal size (default 24)")
        ->capture_default_str();
    c->add_option("--radius", a->radius, "Generated filter radius (default 6)")
        ->capture_default_str();
    c->add_option("--K", a->K,
                  "Band limit for the generated filter (default: full band)");
    c->add_option("--tolerance", a->tolerance,
                  "Max allowed relative L2 error (default 3e-3)")
        ->capture_default_str();
    c->add_option("--signal", a->signal, "Optional signal image (.pgm/.pfm)");
    c->add_option("--xform", a->xform, "Optional transformation field (.pfm)");
    c->add_option("--filter", a->filter, "Optional filter container (XCF1)");
    c->callback([&, a] {
      const XformKind kind = parse_group(a->group);
      if (kind == XformKind::rotation3)
        throw std::invalid_argument("--group rotation3d is not supported here");
      std::mt19937_64 rng(seed);
      const int R = a->radius;
      FreqFilter2d F;
      if (!a->filter.empty()) {
        F = read_filter<double>(a->filter);
        if (F.group != kind)
          throw std::invalid_argument("--filter " + a->filter +
                                      " was decomposed for a different group");
      } else if (kind == XformKind::rotation2) {
        const int K = a->K > 0 ? a->K : 64;
        int na = std::max(64, 2 * K + 2);
        na += na % 2;
        F = decompose_rotation2(random_smooth_filter(R, rng), double(R),
                                double(R), K, 24, na, double(R));
      } else {
        const int K = a->K > 0 ? a->K : 46;
        F = decompose_scale2(annular_filter(R, rng), double(R), double(R), K,
                             48, 32, 1.0, double(R));
      }
      Field2d H = a->signal.empty() ? random_field(a->size, a->size, rng)
                                    : load_image(a->signal);
      XformFieldd T = a->xform.empty()
                          ? random_xform(kind, H.width(), H.height(), rng)
                          : read_xform<double>(a->xform, kind);
      Timer t;
      auto fc = xcorr_fast(H, T, F);
      auto fv = xconv_fast(H, T, F);
      auto bc = xcorr_brute(H, T, F);
      auto bv = xconv_brute(H, T, F);
      auto rel = [](const Field2d& x, const Field2d& y) {
        const double d = std::sqrt(y.values.abs2().sum());
        const double n = std::sqrt((x.values - y.values).abs2().sum());
        return d > 0 ? n / d : n;
      };
      const double err =
          std::max(rel(fc.output, bc.output), rel(fv.output, bv.output));
      std::printf("max relative error: %.6g (tolerance %.3g)\n", err,
                  a->tolerance);
      std::printf("standard convolutions: %lld per direction (%d components)\n",
                  fc.standard_ops, F.n_components());
      std::printf("elapsed: %.3fs\n", t.seconds());
      if (!(err <= a->tolerance)) {
        std::fprintf(stderr,
                     "oracle-check: error %.6g exceeds tolerance %.3g\n", err,
                     a->tolerance);
        exit_code = 1;
      }
    });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  return exit_code;
}

int main(int argc, char** argv) {
  try {
    return run(argc, argv);
  } catch (const IoError& e) {
    std::fprintf(stderr, "io error: %s\n", e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "parameter error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
