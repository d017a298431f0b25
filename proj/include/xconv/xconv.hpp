#pragma once

#include <xconv/contour.hpp>
#include <xconv/ecd.hpp>
#include <xconv/engine.hpp>
#include <xconv/engine3d.hpp>
#include <xconv/field.hpp>
#include <xconv/fft.hpp>
#include <xconv/freq_filter.hpp>
#include <xconv/io.hpp>
#include <xconv/lic.hpp>
#include <xconv/polar.hpp>
#include <xconv/sph.hpp>
#include <xconv/vote_filter.hpp>
#include <xconv/wigner.hpp>
