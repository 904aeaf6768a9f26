#include "fidbench/serialization.hpp"

#include <istream>
#include <ostream>
#include <string>
#include <vector>

#include "fidbench/error.hpp"

namespace fidbench {

namespace {

Json part_json(const CMatrix& m, bool imag) {
  Json rows = Json::array();
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    Json row = Json::array();
    for (Eigen::Index j = 0; j < m.cols(); ++j) row.push_back(imag ? m(i, j).imag() : m(i, j).real());
    rows.push_back(std::move(row));
  }
  return rows;
}

Json vector_part_json(const CVector& v, bool imag) {
  Json out = Json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) out.push_back(imag ? v(i).imag() : v(i).real());
  return out;
}

const Json& field(const Json& j, const char* key) {
  if (!j.is_object() || !j.contains(key)) {
    throw FormatError(std::string("missing field \"") + key + "\"");
  }
  return j.at(key);
}

double number(const Json& j) {
  if (!j.is_number()) throw FormatError("expected a number");
  return j.get<double>();
}

CVector vector_from_json(const Json& re, const Json& im) {
  if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty()) {
    throw FormatError("vector parts must be equal-length non-empty arrays");
  }
  CVector v(static_cast<Eigen::Index>(re.size()));
  for (std::size_t i = 0; i < re.size(); ++i) v(i) = Complex(number(re[i]), number(im[i]));
  return v;
}

}  // namespace

Json real_part_json(const CMatrix& m) { return part_json(m, false); }
Json imag_part_json(const CMatrix& m) { return part_json(m, true); }

CMatrix matrix_from_json(const Json& re, const Json& im) {
  if (!re.is_array() || !im.is_array() || re.size() != im.size() || re.empty()) {
    throw FormatError("matrix parts must be equal-size non-empty arrays of rows");
  }
  const auto rows = static_cast<Eigen::Index>(re.size());
  CMatrix m(rows, rows);
  for (Eigen::Index i = 0; i < rows; ++i) {
    const Json& rr = re[i];
    const Json& ir = im[i];
    if (!rr.is_array() || !ir.is_array() || rr.size() != re.size() || ir.size() != re.size()) {
      throw FormatError("matrix rows must have length " + std::to_string(re.size()));
    }
    for (Eigen::Index j = 0; j < rows; ++j) m(i, j) = Complex(number(rr[j]), number(ir[j]));
  }
  return m;
}

Json record_to_json(const MeasurementRecord& record) {
  Json j;
  j["kind"] = std::string(to_string(record.kind()));
  if (record.kind() == MeasurementKind::covariant_rank1) {
    j["psi_re"] = vector_part_json(record.direction(), false);
    j["psi_im"] = vector_part_json(record.direction(), true);
  } else {
    j["basis_re"] = real_part_json(record.basis());
    j["basis_im"] = imag_part_json(record.basis());
    j["k"] = record.outcome_index();
  }
  return j;
}

MeasurementRecord record_from_json(const Json& j) {
  const Json& kind_field = field(j, "kind");
  if (!kind_field.is_string()) throw FormatError("\"kind\" must be a string");
  auto kind = parse_measurement(kind_field.get<std::string>());
  if (!kind) throw FormatError("unknown measurement kind \"" + kind_field.get<std::string>() + "\"");
  try {
    if (*kind == MeasurementKind::covariant_rank1) {
      return MeasurementRecord::covariant(vector_from_json(field(j, "psi_re"), field(j, "psi_im")));
    }
    const Json& k = field(j, "k");
    if (!k.is_number_integer()) throw FormatError("\"k\" must be an integer");
    return MeasurementRecord::in_basis(matrix_from_json(field(j, "basis_re"), field(j, "basis_im")),
                                       k.get<int>());
  } catch (const InvalidArgument& err) {
    throw FormatError(std::string("invalid measurement record: ") + err.what());
  }
}

void write_ensemble_jsonl(std::ostream& os, const WeightedEnsemble& e) {
  for (std::size_t j = 0; j < e.size(); ++j) {
    Json line;
    line["w"] = e.weights()[j];
    line["re"] = real_part_json(e.particle(j).matrix());
    line["im"] = imag_part_json(e.particle(j).matrix());
    os << line.dump() << '\n';
  }
}

WeightedEnsemble read_ensemble_jsonl(std::istream& is) {
  std::vector<DensityMatrix> particles;
  std::vector<double> weights;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      Json j = Json::parse(line);
      weights.push_back(number(field(j, "w")));
      particles.emplace_back(matrix_from_json(field(j, "re"), field(j, "im")));
    } catch (const std::exception& err) {
      throw FormatError("ensemble line " + std::to_string(line_no) + ": " + err.what());
    }
  }
  if (particles.empty()) throw FormatError("ensemble file contains no particles");
  try {
    return WeightedEnsemble::normalized(std::move(particles), std::move(weights));
  } catch (const InvalidArgument& err) {
    throw FormatError(std::string("invalid ensemble: ") + err.what());
  }
}

Json bound_report_to_json(const BoundReport& report) {
  Json j;
  j["pure_optimum"] = report.pure_optimum ? Json(*report.pure_optimum) : Json(nullptr);
  j["fvg_bound"] = report.fvg_bound;
  j["super_analytic_bound"] = report.super_analytic_bound;
  j["super_exact_bound"] = report.super_exact_bound;
  j["sigma_sharp_is_state"] = report.sigma_sharp_is_state;
  j["mean_estimator_value"] = report.mean_estimator_posterior_value;
  return j;
}

}  // namespace fidbench
