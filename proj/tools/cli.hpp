#pragma once

#include <cmath>
#include <cstdint>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "devitensor/devitensor.hpp"
#include "devitensor/io.hpp"

namespace devitensor::cli {

using Json = nlohmann::ordered_json;

enum ExitCode { kOk = 0, kValidation = 1, kNumerical = 2 };

struct Options {
  std::string command;
  std::string input;
  std::string format = "voigt6";
  std::string voigt_convention = "stiffness";
  bool json = false;
  std::uint64_t seed = 0;
  std::vector<double> dirs;  // flattened triples for `young`
  Tolerances tol;
};

// ---------------------------------------------------------------------------
// JSON helpers

// x + 0.0 turns -0.0 into 0.0
inline double plain(double x) { return x + 0.0; }

inline Json to_json(const Vec3& v) { return Json::array({plain(v[0]), plain(v[1]), plain(v[2])}); }

inline Json to_json(const DenseTensor& t) {
  switch (t.order()) {
    case 0: return plain(t[0]);
    case 1: return Json::array({plain(t[0]), plain(t[1]), plain(t[2])});
    default: {
      Json out = Json::array();
      const std::size_t stride = t.size() / 3;
      for (int i = 0; i < 3; ++i) {
        DenseTensor sub(t.order() - 1);
        for (std::size_t k = 0; k < stride; ++k) sub.coeffs()[k] = t.coeffs()[i * stride + k];
        out.push_back(to_json(sub));
      }
      return out;
    }
  }
}

inline Json to_json(const MultipoleForm& mp) {
  Json dirs = Json::array();
  for (const Vec3& n : mp.directions) dirs.push_back(to_json(n));
  return Json{{"order", mp.order}, {"amplitude", mp.amplitude}, {"directions", dirs}};
}

inline Json to_json(const SymmetryPlaneSet& s) {
  switch (s.kind) {
    case PlaneSetKind::AllDirections: return Json{{"kind", "all"}};
    case PlaneSetKind::TransverseFamily: return Json{{"kind", "transverse"}, {"axis", to_json(s.axis)}};
    case PlaneSetKind::Finite: {
      Json normals = Json::array();
      for (const Vec3& n : s.normals) normals.push_back(to_json(n));
      return Json{{"kind", "finite"}, {"count", s.normals.size()}, {"normals", normals}};
    }
  }
  return {};
}

inline Json to_json(const Tolerances& t) {
  return Json{{"sym", t.sym},   {"trace", t.trace}, {"orth", t.orth},   {"gap", t.gap},
              {"dir", t.dir},   {"mirror", t.mirror}, {"zero", t.zero}, {"pair", t.pair},
              {"rec2", t.rec2}, {"rec4", t.rec4},   {"stiffness_accept", t.stiffness_accept}};
}

// ---------------------------------------------------------------------------
// Text helpers

inline std::string fmt(double x) {
  std::ostringstream s;
  s << std::setprecision(10) << std::defaultfloat << (std::abs(x) < 5e-16 ? 0.0 : x);
  return s.str();
}

inline std::string fmt(const Vec3& v) { return "(" + fmt(v[0]) + ", " + fmt(v[1]) + ", " + fmt(v[2]) + ")"; }

inline void print_matrix(std::ostream& out, const std::string& title, const DenseTensor& m) {
  out << title << '\n';
  for (int i = 0; i < 3; ++i) {
    out << "  ";
    for (int j = 0; j < 3; ++j) out << std::setw(18) << fmt(m(i, j));
    out << '\n';
  }
}

inline void print_multipoles(std::ostream& out, const std::string& title, const MultipoleForm& mp) {
  out << title << ": amplitude " << fmt(mp.amplitude) << '\n';
  for (std::size_t k = 0; k < mp.directions.size(); ++k) out << "  n" << k + 1 << " = " << fmt(mp.directions[k]) << '\n';
}

inline void print_planes(std::ostream& out, const std::string& title, const SymmetryPlaneSet& s) {
  out << title << ": ";
  switch (s.kind) {
    case PlaneSetKind::AllDirections: out << "every direction\n"; return;
    case PlaneSetKind::TransverseFamily:
      out << "axis " << fmt(s.axis) << " and every normal orthogonal to it\n";
      return;
    case PlaneSetKind::Finite:
      out << s.normals.size() << " plane(s)\n";
      for (const Vec3& n : s.normals) out << "  " << fmt(n) << '\n';
      return;
  }
}

// ---------------------------------------------------------------------------
// Commands

struct Input {
  TensorFile file;
  std::optional<StiffnessTensor> stiffness;
};

inline Input load(const Options& opt, std::ostream& err) {
  Input in;
  in.file = parse_tensor_file(opt.input, parse_format(opt.format), parse_voigt_convention(opt.voigt_convention),
                              opt.tol);
  if (in.file.tensor.order() == 4) {
    in.stiffness = StiffnessTensor::from(in.file.tensor, opt.tol);
    if (in.stiffness->was_symmetrized())
      err << "warning: input symmetry residual " << in.stiffness->input_residual()
          << " removed by symmetrization\n";
  }
  return in;
}

inline const StiffnessTensor& need_stiffness(const Input& in, const std::string& cmd) {
  if (!in.stiffness) throw Error(ErrorCode::DimensionError, cmd + " needs a stiffness tensor (order 4)");
  return *in.stiffness;
}

inline double relative(double residual, double scale) { return scale > 0.0 ? residual / scale : residual; }

inline Json cmd_decompose(const Input& in, const Options& opt, std::ostream& out) {
  if (!in.stiffness) {
    const DenseTensor& t = in.file.tensor;
    const SecondOrderDecomposition dec = decompose2(t);
    const double res = relative((dec.reconstruct() - t).norm(), t.norm());
    if (!opt.json) {
      out << "second-order decomposition T = d I + eps.dvec + D\n";
      out << "d    = " << fmt(dec.d) << "\ndvec = " << fmt(dec.dvec) << '\n';
      print_matrix(out, "D", dec.D.tensor());
      out << "relative reconstruction residual " << fmt(res) << '\n';
    }
    return Json{{"order", 2},
                {"d", dec.d},
                {"dvec", to_json(dec.dvec)},
                {"D", to_json(dec.D.tensor())},
                {"reconstruction_residual", res}};
  }
  const StiffnessTensor& c = *in.stiffness;
  const StiffnessDecomposition dec = decompose_stiffness(c, opt.tol);
  const BackusForm b = dec.backus();
  const auto parts = deviatoric_parts(dec);
  const double res = relative((reconstruct_stiffness(dec) - c.tensor()).norm(), c.norm());
  Json norms = Json::array();
  for (const auto& p : parts) norms.push_back(p.norm());
  if (!opt.json) {
    out << "stiffness decomposition\n";
    out << "lambda = " << fmt(dec.lambda) << "\nmu     = " << fmt(dec.mu) << '\n';
    print_matrix(out, "D (second-order deviator)", dec.D.tensor());
    print_matrix(out, "Dhat (second-order deviator)", dec.Dhat.tensor());
    out << "D4 (fourth-order deviator) norm " << fmt(dec.D4.norm()) << '\n';
    out << "Backus form: d = " << fmt(b.d) << ", dhat = " << fmt(b.dhat) << '\n';
    out << "part norms (D4, 6 s(I D1), 3 s(I I) d, phi(D2), phi(I) dhat/2):";
    for (const auto& p : parts) out << ' ' << fmt(p.norm());
    out << "\nrelative reconstruction residual " << fmt(res) << '\n';
  }
  return Json{{"order", 4},
              {"lambda", dec.lambda},
              {"mu", dec.mu},
              {"D", to_json(dec.D.tensor())},
              {"Dhat", to_json(dec.Dhat.tensor())},
              {"D4", to_json(dec.D4.tensor())},
              {"backus",
               {{"d", b.d}, {"dhat", b.dhat}, {"D1", to_json(b.D1.tensor())}, {"D2", to_json(b.D2.tensor())}}},
              {"part_norms", norms},
              {"reconstruction_residual", res}};
}

inline Json cmd_multipoles(const Input& in, const Options& opt, std::ostream& out) {
  if (!in.stiffness) {
    const DenseTensor& t = in.file.tensor;
    const Deviator dev = traceless_symmetric_part(t);
    const MultipoleForm mp = multipoles(dev, opt.seed, opt.tol);
    Json result{{"order", 2}, {"deviator", to_json(mp)}};
    if (!mp.is_zero()) {
      const EigenSystem3 es = eigen_sym3(dev.tensor(), opt.tol);
      const EigenMultipoleCase cs = classify_eigen_multipole(t, mp, opt.tol);
      MultipoleForm local{2, mp.amplitude, {}};
      for (const Vec3& n : mp.directions)
        local.directions.push_back(canonical_sign({dot(n, es.vectors[0]), dot(n, es.vectors[1]), dot(n, es.vectors[2])}));
      Json vecs = Json::array();
      for (const Vec3& v : es.vectors) vecs.push_back(to_json(v));
      result["eigen"] = {{"values", {es.values[0], es.values[1], es.values[2]}}, {"vectors", vecs}};
      result["eigenframe"] = to_json(local);
      result["case"] = std::string(to_string(cs.id));
      if (!opt.json) {
        print_multipoles(out, "multipoles of dev(T)", mp);
        out << "deviator eigenvalues " << fmt(es.values[0]) << ", " << fmt(es.values[1]) << ", "
            << fmt(es.values[2]) << '\n';
        print_multipoles(out, "in the eigenframe", local);
        out << "case: " << to_string(cs.id) << '\n';
      }
    } else if (!opt.json) {
      out << "dev(T) vanishes: no multipoles\n";
    }
    return result;
  }
  const StiffnessDecomposition dec = decompose_stiffness(*in.stiffness, opt.tol);
  const MultipoleForm a = multipoles(dec.D, opt.seed, opt.tol);
  const MultipoleForm b = multipoles(dec.Dhat, opt.seed, opt.tol);
  const MultipoleForm c = multipoles(dec.D4, opt.seed, opt.tol);
  if (!opt.json) {
    print_multipoles(out, "D", a);
    print_multipoles(out, "Dhat", b);
    print_multipoles(out, "D4", c);
  }
  return Json{{"order", 4}, {"D", to_json(a)}, {"Dhat", to_json(b)}, {"D4", to_json(c)}};
}

inline Json cmd_classify(const Input& in, const Options& opt, std::ostream& out) {
  const StiffnessClassification cls = classify_stiffness(need_stiffness(in, "classify"), opt.seed, opt.tol);
  if (!opt.json) {
    out << "class: " << to_string(cls.label) << '\n';
    print_planes(out, "mirror planes", cls.planes);
    print_planes(out, "planes of D", cls.planes_D);
    print_planes(out, "planes of Dhat", cls.planes_Dhat);
    print_planes(out, "planes of D4", cls.planes_D4);
  }
  return Json{{"label", std::string(to_string(cls.label))},
              {"planes", to_json(cls.planes)},
              {"deviators",
               {{"D", {{"multipoles", to_json(cls.mp_D)}, {"planes", to_json(cls.planes_D)}}},
                {"Dhat", {{"multipoles", to_json(cls.mp_Dhat)}, {"planes", to_json(cls.planes_Dhat)}}},
                {"D4", {{"multipoles", to_json(cls.mp_D4)}, {"planes", to_json(cls.planes_D4)}}}}}};
}

inline std::vector<Vec3> default_directions() {
  const double r2 = 1.0 / std::sqrt(2.0), r3 = 1.0 / std::sqrt(3.0);
  return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {0, r2, r2}, {r2, 0, r2}, {r2, r2, 0}, {r3, r3, r3}};
}

/// Classical Young's modulus 1 / (d⊗d : C⁻¹ : d⊗d), via the Kelvin matrix.
inline std::optional<double> classical_young(const DenseTensor& c, const Vec3& dir) {
  const auto eig = jacobi_eigen<6>(kelvin_map(c));
  const KelvinVector v = kelvin_vector(outer_product(dir, dir));
  double s = 0.0;
  for (int k = 0; k < 6; ++k) {
    if (!(eig.values[k] > 0.0)) return std::nullopt;
    double proj = 0.0;
    for (int m = 0; m < 6; ++m) proj += eig.vectors[m][k] * v[m];
    s += proj * proj / eig.values[k];
  }
  return 1.0 / s;
}

inline Json cmd_young(const Input& in, const Options& opt, std::ostream& out) {
  const StiffnessTensor& c = need_stiffness(in, "young");
  const StiffnessDecomposition dec = decompose_stiffness(c, opt.tol);
  std::vector<Vec3> dirs;
  if (opt.dirs.empty()) {
    dirs = default_directions();
  } else {
    if (opt.dirs.size() % 3 != 0) throw Error(ErrorCode::DimensionError, "--dir takes three components");
    for (std::size_t k = 0; k < opt.dirs.size(); k += 3) {
      const Vec3 d{opt.dirs[k], opt.dirs[k + 1], opt.dirs[k + 2]};
      if (!(norm(d) > 0.0) || !std::isfinite(norm(d))) throw Error(ErrorCode::DimensionError, "--dir must be nonzero");
      dirs.push_back(normalized(d));
    }
  }
  Json samples = Json::array();
  if (!opt.json) out << std::setw(44) << "direction" << std::setw(20) << "E" << std::setw(20) << "E_classical" << '\n';
  for (const Vec3& d : dirs) {
    const double e = youngs_modulus(dec, d);
    const auto ec = classical_young(c.tensor(), d);
    samples.push_back({{"direction", to_json(d)}, {"E", e}, {"E_classical", ec ? Json(*ec) : Json(nullptr)}});
    if (!opt.json)
      out << std::setw(44) << fmt(d) << std::setw(20) << fmt(e) << std::setw(20) << (ec ? fmt(*ec) : "n/a") << '\n';
  }
  return Json{{"isotropic_reference", 1.0 / (dec.lambda + 2.0 * dec.mu)}, {"samples", samples}};
}

struct Check {
  std::string name;
  double value;
  double limit;
};

inline Json cmd_check(const Input& in, const Options& opt, std::ostream& out, bool& all_pass) {
  std::vector<Check> checks;
  if (!in.stiffness) {
    const DenseTensor& t = in.file.tensor;
    const double scale = std::max(t.norm(), 1e-300);
    const SecondOrderDecomposition dec = decompose2(t);
    checks.push_back({"decompose2_roundtrip", (dec.reconstruct() - t).norm() / scale, 1e-12});
    const Deviator dev = traceless_symmetric_part(t);
    const MultipoleForm mp = multipoles(dev, opt.seed, opt.tol);
    checks.push_back(
        {"multipole_reconstruction", (mp.reconstruct() - dev.tensor()).norm() / std::max(dev.norm(), 1e-300), opt.tol.rec2});
    checks.push_back({"deviator_trace", trace_residual(dev.tensor()) / scale, opt.tol.trace});
  } else {
    const StiffnessTensor& c = *in.stiffness;
    const double scale = std::max(c.norm(), 1e-300);
    const StiffnessDecomposition dec = decompose_stiffness(c, opt.tol);
    checks.push_back({"stiffness_roundtrip", (reconstruct_stiffness(dec) - c.tensor()).norm() / scale, 1e-10});
    checks.push_back({"engineering_form", (engineering_expansion(dec) - c.tensor()).norm() / scale, 1e-10});
    const StiffnessDecomposition h = decompose_stiffness_harmonic(c, opt.tol);
    checks.push_back({"harmonic_route_agreement",
                      (reconstruct_stiffness(h) - reconstruct_stiffness(dec)).norm() / scale +
                          std::abs(h.lambda - dec.lambda) / scale + std::abs(h.mu - dec.mu) / scale,
                      1e-10});
    const auto parts = deviatoric_parts(dec);
    double sum = 0.0;
    for (const auto& p : parts) sum += p.norm() * p.norm();
    checks.push_back({"pythagoras", std::abs(sum - c.norm() * c.norm()) / (scale * scale), 1e-9});
    const KelvinMatrix k = kelvin_map(c.tensor(), opt.tol);
    checks.push_back({"kelvin_norm", std::abs(frobenius(k) - c.norm()) / scale, 1e-12});
    checks.push_back({"eigentensor_reconstruction", (eigentensors(c.tensor(), opt.tol).reconstruct() - c.tensor()).norm() / scale,
                      1e-9});
    const Deviator* devs[] = {&dec.D, &dec.Dhat, &dec.D4};
    const char* names[] = {"multipoles_D", "multipoles_Dhat", "multipoles_D4"};
    for (int k2 = 0; k2 < 3; ++k2) {
      const MultipoleForm mp = multipoles(*devs[k2], opt.seed, opt.tol);
      const double dn = std::max(devs[k2]->norm(), 1e-300);
      checks.push_back({names[k2], (mp.reconstruct() - devs[k2]->tensor()).norm() / dn,
                        devs[k2]->order() == 2 ? opt.tol.rec2 : opt.tol.rec4});
    }
  }
  Json arr = Json::array();
  all_pass = true;
  for (const Check& c : checks) {
    const bool pass = c.value <= c.limit;
    all_pass = all_pass && pass;
    arr.push_back({{"name", c.name}, {"value", c.value}, {"limit", c.limit}, {"pass", pass}});
    if (!opt.json)
      out << (pass ? "PASS " : "FAIL ") << std::left << std::setw(28) << c.name << std::right << std::setw(16)
          << fmt(c.value) << "  (limit " << fmt(c.limit) << ")\n";
  }
  return Json{{"checks", arr}, {"all_pass", all_pass}};
}

// ---------------------------------------------------------------------------
// Entry point

inline int execute(const Options& opt, std::ostream& out, std::ostream& err) {
  try {
    const Input in = load(opt, err);
    Json result;
    bool ok = true;
    if (opt.command == "decompose")
      result = cmd_decompose(in, opt, out);
    else if (opt.command == "multipoles")
      result = cmd_multipoles(in, opt, out);
    else if (opt.command == "classify")
      result = cmd_classify(in, opt, out);
    else if (opt.command == "young")
      result = cmd_young(in, opt, out);
    else
      result = cmd_check(in, opt, out, ok);
    if (opt.json) {
      Json doc{{"command", opt.command},
               {"input",
                {{"path", opt.input},
                 {"format", std::string(to_string(in.file.format))},
                 {"voigt_convention", opt.voigt_convention},
                 {"order", in.file.tensor.order()},
                 {"name", in.file.name},
                 {"units", in.file.units},
                 {"symmetrized", in.stiffness ? in.stiffness->was_symmetrized() : false},
                 {"symmetry_residual", in.stiffness ? in.stiffness->input_residual() : 0.0}}},
               {"seed", opt.seed},
               {"tolerances", to_json(opt.tol)},
               {"result", result}};
      out << doc.dump(2) << '\n';
    }
    return ok ? kOk : kNumerical;
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return is_numerical_failure(e.code()) ? kNumerical : kValidation;
  }
}

inline int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Deviatoric decomposition, multipoles and symmetry classes of 3D tensors", "devitensor"};
  app.require_subcommand(1, 1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--input", opt.input, "tensor file")->required();
    sub->add_option("--format", opt.format, "voigt6, kelvin6, full81, matrix3 or json")
        ->check(CLI::IsMember({"voigt6", "kelvin6", "full81", "matrix3", "json"}));
    sub->add_option("--voigt-convention", opt.voigt_convention,
                    "stiffness (V_IJ = C_ijkl) or compliance (engineering shear factors)")
        ->check(CLI::IsMember({"stiffness", "compliance"}));
    sub->add_flag("--json", opt.json, "machine-readable output");
    sub->add_option("--seed", opt.seed, "root finder seed");
    sub->add_option("--tol-sym", opt.tol.sym);
    sub->add_option("--tol-trace", opt.tol.trace);
    sub->add_option("--tol-orth", opt.tol.orth);
    sub->add_option("--tol-gap", opt.tol.gap);
    sub->add_option("--tol-dir", opt.tol.dir);
    sub->add_option("--tol-mirror", opt.tol.mirror);
    sub->add_option("--tol-zero", opt.tol.zero);
    sub->add_option("--tol-pair", opt.tol.pair);
    sub->add_option("--tol-rec2", opt.tol.rec2);
    sub->add_option("--tol-rec4", opt.tol.rec4);
    sub->add_option("--tol-stiffness-accept", opt.tol.stiffness_accept);
  };
  add_common(app.add_subcommand("decompose", "Lame scalars and deviators, or d/dvec/D for order 2"));
  add_common(app.add_subcommand("multipoles", "Maxwell multipoles of the deviators"));
  add_common(app.add_subcommand("classify", "mirror planes and symmetry class of a stiffness tensor"));
  CLI::App* young = app.add_subcommand("young", "directional Young's modulus samples");
  add_common(young);
  young->add_option("--dir", opt.dirs, "direction x y z (repeatable)")->expected(3)->multi_option_policy(CLI::MultiOptionPolicy::TakeAll);
  add_common(app.add_subcommand("check", "round-trip and invariant checks"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: usage: " << e.what() << '\n';
    return kValidation;
  }
  opt.command = app.get_subcommands().front()->get_name();
  return execute(opt, out, err);
}

}  // namespace devitensor::cli
