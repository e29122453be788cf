#pragma once

#include "wearsim/assembly.hpp"
#include "wearsim/benchmarks.hpp"
#include "wearsim/config.hpp"
#include "wearsim/contact_laws.hpp"
#include "wearsim/expression.hpp"
#include "wearsim/linear_solve.hpp"
#include "wearsim/material.hpp"
#include "wearsim/mesh.hpp"
#include "wearsim/mesh_builders.hpp"
#include "wearsim/run.hpp"
#include "wearsim/solver.hpp"
#include "wearsim/surface.hpp"
#include "wearsim/verify.hpp"
#include "wearsim/vtk.hpp"
