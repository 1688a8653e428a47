// quadrature.hpp
// Adaptive-quadrature evaluation of the radial integrals, independent of the
// closed forms; backs the `verify integrals` cross-checks.
#pragma once

#include "pinscf/radial.hpp"

namespace pinscf {
namespace quadrature {

double overlap(const RadialFunction& f, const RadialFunction& g);
double kinetic(const RadialFunction& f, const RadialFunction& g);
double nuclear_attraction(const RadialFunction& f, const RadialFunction& g, double Z);
// (fg|hk), nested integration split at the inner radius.
double coulomb_repulsion(const RadialFunction& f, const RadialFunction& g,
                         const RadialFunction& h, const RadialFunction& k);

}  // namespace quadrature
}  // namespace pinscf
