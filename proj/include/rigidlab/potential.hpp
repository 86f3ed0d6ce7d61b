#pragma once

#include "rigidlab/maps.hpp"
#include "rigidlab/periodic.hpp"
#include "rigidlab/trig_poly.hpp"

#include <json.hpp>

namespace rigidlab {

/// p applied to coordinate `axis` of the point.
ScalarField trig_field(TrigPoly p, int axis = 0);
/// -log |Jac f|.
ScalarField geometric_potential(const ExpandingMap& f);
/// log |Jac f|.
ScalarField log_jacobian_field(const ExpandingMap& f);

/// Build a potential from JSON. Accepted forms:
///   {"kind": "zero"}, {"kind": "constant", "value": v},
///   {"kind": "geometric"},
///   {"kind": "trig", "axis": "x"|"y", "cos_coeffs": [...], "sin_coeffs": [...], "constant": c},
///   {"kind": "sum", "terms": [...]}.
ScalarField potential_from_json(const nlohmann::json& j, const ExpandingMap& f);

}  // namespace rigidlab
