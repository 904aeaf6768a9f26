#pragma once

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "fidbench/bounds.hpp"
#include "fidbench/ensembles.hpp"
#include "fidbench/measure.hpp"

namespace fidbench {

using Json = nlohmann::ordered_json;

// Row-major [[...], ...] arrays of the real and imaginary parts.
Json real_part_json(const CMatrix& m);
Json imag_part_json(const CMatrix& m);
CMatrix matrix_from_json(const Json& re, const Json& im);

/// {"kind": "covariant_rank1", "psi_re": [...], "psi_im": [...]} or
/// {"kind": "haar_basis", "basis_re": [[...]], "basis_im": [[...]], "k": int}.
Json record_to_json(const MeasurementRecord& record);
/// Throws FormatError on missing or mistyped fields; extra keys are ignored.
MeasurementRecord record_from_json(const Json& j);

/// One line per particle: {"w": real, "re": [[...]], "im": [[...]]}.
void write_ensemble_jsonl(std::ostream& os, const WeightedEnsemble& e);
/// Weights are renormalized; line numbers appear in FormatError messages.
WeightedEnsemble read_ensemble_jsonl(std::istream& is);

/// Exactly: pure_optimum (null when absent), fvg_bound, super_analytic_bound,
/// super_exact_bound, sigma_sharp_is_state, mean_estimator_value.
Json bound_report_to_json(const BoundReport& report);

}  // namespace fidbench
