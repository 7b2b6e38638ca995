#ifndef GRAPHHEAT_HPP
#define GRAPHHEAT_HPP

#include "graphheat/completeness.hpp"
#include "graphheat/error.hpp"
#include "graphheat/expm.hpp"
#include "graphheat/graph.hpp"
#include "graphheat/heat_kernel.hpp"
#include "graphheat/io.hpp"
#include "graphheat/laplacian.hpp"
#include "graphheat/model_spec.hpp"
#include "graphheat/model_tree.hpp"
#include "graphheat/montecarlo.hpp"
#include "graphheat/spectrum.hpp"
#include "graphheat/version.hpp"

#endif  // GRAPHHEAT_HPP
