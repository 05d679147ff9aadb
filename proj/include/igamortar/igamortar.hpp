#pragma once

#include "igamortar/core.hpp"
#include "igamortar/knot_vector.hpp"
#include "igamortar/quadrature.hpp"
#include "igamortar/nurbs_patch.hpp"
#include "igamortar/multipatch.hpp"
#include "igamortar/spaces.hpp"
#include "igamortar/dense.hpp"
#include "igamortar/sparse.hpp"
#include "igamortar/assembly.hpp"
#include "igamortar/infsup.hpp"
#include "igamortar/manufactured.hpp"
#include "igamortar/benchmarks.hpp"
#include "igamortar/studies.hpp"
#include "igamortar/domain_io.hpp"
