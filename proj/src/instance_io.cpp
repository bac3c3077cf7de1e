#include "pcsdp/instance_io.hpp"

#include <cmath>
#include <utility>

#include <json.hpp>

namespace pcsdp {

namespace {

using nlohmann::json;

Matrix matrix_from_json(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) {
    throw ValidationError(where + ": expected a non-empty array of rows");
  }
  const int rows = static_cast<int>(j.size());
  Matrix m;
  for (int i = 0; i < rows; ++i) {
    const json& row = j[i];
    if (!row.is_array()) {
      throw ValidationError(where + ": row " + std::to_string(i) +
                            " is not an array");
    }
    if (i == 0) {
      m.resize(rows, static_cast<int>(row.size()));
    }
    if (static_cast<int>(row.size()) != m.cols()) {
      throw ValidationError(where + ": ragged rows");
    }
    for (int k = 0; k < m.cols(); ++k) {
      if (!row[k].is_number()) {
        throw ValidationError(where + ": non-numeric entry");
      }
      m(i, k) = row[k].get<double>();
    }
  }
  return m;
}

json matrix_to_json(const Matrix& m) {
  json rows = json::array();
  for (int i = 0; i < m.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < m.cols(); ++k) row.push_back(m(i, k));
    rows.push_back(std::move(row));
  }
  return rows;
}

Vector vector_from_json(const json& j, const std::string& where) {
  if (!j.is_array()) throw ValidationError(where + ": expected an array");
  Vector v(j.size());
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ValidationError(where + ": non-numeric entry");
    v[static_cast<int>(i)] = j[i].get<double>();
  }
  return v;
}

json vector_to_json(const Vector& v) {
  json arr = json::array();
  for (int i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

SymMat sym_from_json(const json& j, int n, const std::string& where) {
  Matrix m = matrix_from_json(j, where);
  if (m.rows() != n || m.cols() != n) {
    throw ValidationError(where + ": expected a " + std::to_string(n) + "x" +
                          std::to_string(n) + " matrix");
  }
  try {
    return SymMat(std::move(m));
  } catch (const InvalidMatrix& e) {
    throw ValidationError(where + ": " + e.what());
  }
}

void require_psd(const SymMat& m, const std::string& where) {
  SpectralDecomp d = eig_sym(m);
  const double scale =
      std::max(1.0, std::max(std::abs(d.min_eigenvalue()),
                             std::abs(d.max_eigenvalue())));
  if (d.min_eigenvalue() < -1e-8 * scale) {
    throw ValidationError(where + ": not positive semidefinite (lambda_min " +
                          std::to_string(d.min_eigenvalue()) + ")");
  }
}

UncertainConstraint robust_from_json(const json& jc, int n, double b_scale,
                                     const std::string& where) {
  UncertainConstraint uc;
  uc.nominal = sym_from_json(jc.at("A0"), n, where + ".A0");
  require_psd(uc.nominal, where + ".A0");
  uc.nominal = SymMat::symmetrized(uc.nominal.mat() / b_scale);

  const json& perts = jc.at("perturbations");
  if (!perts.is_array()) {
    throw ValidationError(where + ".perturbations: expected an array");
  }
  for (std::size_t r = 0; r < perts.size(); ++r) {
    const std::string pw = where + ".perturbations[" + std::to_string(r) + "]";
    SymMat p = sym_from_json(perts[r], n, pw);
    require_psd(p, pw);
    uc.perturbations.push_back(SymMat::symmetrized(p.mat() / b_scale));
  }
  const int k = uc.perturbation_count();

  const json& set = jc.at("set");
  const std::string kind = set.at("kind").get<std::string>();
  Vector delta0 = vector_from_json(set.at("delta0"), where + ".set.delta0");
  if (delta0.size() != k) {
    throw ValidationError(where + ".set.delta0: length must match the number "
                          "of perturbations");
  }
  if (kind == "ellipsoid") {
    Matrix d = matrix_from_json(set.at("D"), where + ".set.D");
    if (d.rows() != k || d.cols() != k) {
      throw ValidationError(where + ".set.D: expected " + std::to_string(k) +
                            "x" + std::to_string(k));
    }
    Eigen::LLT<Matrix> llt(Matrix((d + d.transpose()) * 0.5));
    if (llt.info() != Eigen::Success) {
      throw InvalidUncertaintySet(where + ".set.D: not positive definite");
    }
    // E(delta0, D) must sit inside the nonnegative orthant.
    for (int r = 0; r < k; ++r) {
      if (delta0[r] - std::sqrt(std::max(d(r, r), 0.0)) < -1e-10) {
        throw ValidationError(where + ".set: ellipsoid leaves the nonnegative "
                              "orthant at coordinate " + std::to_string(r));
      }
    }
    uc.set = EllipsoidSet{std::move(delta0), std::move(d)};
  } else if (kind == "box") {
    for (int r = 0; r < k; ++r) {
      if (delta0[r] < 0.0) {
        throw ValidationError(where + ".set.delta0: entries must be "
                              "nonnegative");
      }
    }
    const double rho = set.at("rho").get<double>();
    if (!(rho > 0.0)) {
      throw ValidationError(where + ".set.rho: must be positive");
    }
    uc.set = BoxSet{std::move(delta0), rho};
  } else {
    throw ValidationError(where + ".set.kind: unknown kind '" + kind + "'");
  }
  return uc;
}

}  // namespace

PackCoverInstance load_instance(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }

  PackCoverInstance inst;
  try {
    const std::string variant = doc.at("variant").get<std::string>();
    if (variant == "type1") {
      inst.variant = Variant::TypeI;
    } else if (variant == "type2") {
      inst.variant = Variant::TypeII;
    } else {
      throw ValidationError("variant must be 'type1' or 'type2'");
    }

    const int n = doc.at("n").get<int>();
    if (n < 1) throw ValidationError("n must be >= 1");

    inst.C = sym_from_json(doc.at("C"), n, "C");
    require_psd(inst.C, "C");

    inst.original_b = vector_from_json(doc.at("b"), "b");
    const json& cons = doc.at("constraints");
    if (!cons.is_array() || cons.empty()) {
      throw ValidationError("constraints must be a non-empty array");
    }
    if (static_cast<int>(cons.size()) != inst.original_b.size()) {
      throw ValidationError("b length must equal the number of constraints");
    }
    for (int i = 0; i < inst.original_b.size(); ++i) {
      if (!(inst.original_b[i] > 0.0)) {
        throw ValidationError("b[" + std::to_string(i) +
                              "] must be positive (right-hand sides are "
                              "required to be > 0)");
      }
    }

    bool any_explicit = false;
    bool any_robust = false;
    for (std::size_t i = 0; i < cons.size(); ++i) {
      const std::string where = "constraints[" + std::to_string(i) + "]";
      const double bi = inst.original_b[static_cast<int>(i)];
      if (cons[i].contains("A")) {
        any_explicit = true;
        SymMat a = sym_from_json(cons[i].at("A"), n, where + ".A");
        require_psd(a, where + ".A");
        if (a.is_zero(0.0)) {
          throw ValidationError(where + ".A: constraint matrix is zero");
        }
        inst.constraints.explicit_matrices.push_back(
            SymMat::symmetrized(a.mat() / bi));
      } else if (cons[i].contains("A0")) {
        any_robust = true;
        inst.constraints.robust.push_back(
            robust_from_json(cons[i], n, bi, where));
      } else {
        throw ValidationError(where + ": expected key 'A' or 'A0'");
      }
    }
    if (any_explicit && any_robust) {
      throw ValidationError("mixed explicit and robust constraints are not "
                            "supported in one instance");
    }
    inst.b = Vector::Ones(inst.original_b.size());
  } catch (const json::exception& e) {
    throw ParseError(std::string("document shape: ") + e.what());
  }
  return inst;
}

std::string save_solution(const PrimalDualPair& pair,
                          const SolutionCertSummary& certs) {
  json doc;
  doc["X"] = matrix_to_json(pair.Xhat.mat());
  json y = json::object();
  for (const auto& [idx, w] : pair.yhat) {
    y[std::to_string(idx)] = w;
  }
  doc["y"] = std::move(y);
  doc["primal_objective"] = pair.primal_objective;
  doc["dual_objective"] = pair.dual_objective;
  doc["iterations"] = pair.iterations;
  doc["phases"] = pair.phases;
  doc["epsilon"] = pair.eps_final;
  doc["certificates"] = {{"max_violation", certs.max_violation},
                         {"dual_min_eig", certs.dual_extreme_eig},
                         {"gap", certs.gap}};
  doc["variant"] = pair.variant == Variant::TypeI ? "type1" : "type2";
  doc["solver"] = pair.solver == SolverKind::LogPotential ? "log" : "mwu";
  doc["psi"] = pair.psi;
  if (!pair.dual_atoms.empty()) {
    json atoms = json::array();
    for (const DualAtom& atom : pair.dual_atoms) {
      atoms.push_back({{"index", atom.index},
                       {"weight", atom.weight},
                       {"delta", vector_to_json(atom.delta)}});
    }
    doc["y_atoms"] = std::move(atoms);
  }
  return doc.dump(2) + "\n";
}

PrimalDualPair parse_solution(const std::string& text,
                              SolutionCertSummary* certs) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::exception& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what());
  }
  PrimalDualPair pair;
  try {
    pair.Xhat = SymMat(matrix_from_json(doc.at("X"), "X"));
    for (const auto& [key, value] : doc.at("y").items()) {
      pair.yhat[std::stoi(key)] = value.get<double>();
    }
    pair.primal_objective = doc.at("primal_objective").get<double>();
    pair.dual_objective = doc.at("dual_objective").get<double>();
    pair.iterations = doc.at("iterations").get<long>();
    pair.phases = doc.at("phases").get<int>();
    pair.eps_final = doc.at("epsilon").get<double>();
    if (doc.contains("variant")) {
      pair.variant = doc["variant"].get<std::string>() == "type2"
                         ? Variant::TypeII
                         : Variant::TypeI;
    }
    if (doc.contains("solver")) {
      pair.solver = doc["solver"].get<std::string>() == "mwu"
                        ? SolverKind::Mwu
                        : SolverKind::LogPotential;
    }
    if (doc.contains("psi")) pair.psi = doc["psi"].get<double>();
    if (doc.contains("y_atoms")) {
      for (const json& ja : doc["y_atoms"]) {
        DualAtom atom;
        atom.index = ja.at("index").get<int>();
        atom.weight = ja.at("weight").get<double>();
        atom.delta = vector_from_json(ja.at("delta"), "y_atoms.delta");
        pair.dual_atoms.push_back(std::move(atom));
      }
    }
    if (certs) {
      const json& jc = doc.at("certificates");
      certs->max_violation = jc.at("max_violation").get<double>();
      certs->dual_extreme_eig = jc.at("dual_min_eig").get<double>();
      certs->gap = jc.at("gap").get<double>();
    }
  } catch (const json::exception& e) {
    throw ParseError(std::string("document shape: ") + e.what());
  }
  return pair;
}

}  // namespace pcsdp
