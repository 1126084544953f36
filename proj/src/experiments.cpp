#include "rlab/experiments.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "rlab/channels.hpp"
#include "rlab/eigenrelevance.hpp"
#include "rlab/errors.hpp"
#include "rlab/fock_oracle.hpp"
#include "rlab/gaussian_sector.hpp"
#include "rlab/kubo_mori.hpp"
#include "rlab/props.hpp"
#include "rlab/toy_rg.hpp"
#include "rlab/util.hpp"

namespace rlab::cli {

using nlohmann::json;

namespace {

enum class ParamType { number, integer, boolean, string, array };

struct ParamSpec {
  const char* key;
  ParamType type;
  bool required;
  double lo;
  double hi;
  json default_value;
  const char* help;
};

struct ExperimentDef {
  const char* name;
  bool needs_seed;
  std::vector<ParamSpec> params;
  void (*runner)(const json& p, const ExperimentConfig& cfg, json& meta);
  void (*conventions)(const json& p, std::vector<std::string>& out);
};

constexpr double kInf = std::numeric_limits<double>::infinity();

bool type_matches(const json& v, ParamType t) {
  switch (t) {
    case ParamType::number:
      return v.is_number();
    case ParamType::integer:
      return v.is_number_integer();
    case ParamType::boolean:
      return v.is_boolean();
    case ParamType::string:
      return v.is_string();
    case ParamType::array:
      return v.is_array();
  }
  return false;
}

const char* type_name(ParamType t) {
  switch (t) {
    case ParamType::number:
      return "number";
    case ParamType::integer:
      return "integer";
    case ParamType::boolean:
      return "boolean";
    case ParamType::string:
      return "string";
    case ParamType::array:
      return "array";
  }
  return "?";
}

// schema check; fills defaults into a copy of the params
json check_params(const ExperimentDef& def, const json& params, std::vector<std::string>& errors) {
  json resolved = json::object();
  std::set<std::string> known;
  for (const auto& spec : def.params) known.insert(spec.key);
  for (auto it = params.begin(); it != params.end(); ++it) {
    if (!known.count(it.key())) {
      errors.push_back("unknown parameter '" + it.key() + "' for experiment " + def.name);
    }
  }
  for (const auto& spec : def.params) {
    if (params.contains(spec.key)) {
      const json& v = params.at(spec.key);
      if (!type_matches(v, spec.type)) {
        errors.push_back(std::string("parameter '") + spec.key + "' must be of type " +
                         type_name(spec.type));
        continue;
      }
      if ((spec.type == ParamType::number || spec.type == ParamType::integer) &&
          (v.get<double>() < spec.lo || v.get<double>() > spec.hi)) {
        std::ostringstream os;
        os << "parameter '" << spec.key << "' = " << v.get<double>() << " outside ["
           << spec.lo << ", " << spec.hi << "]";
        errors.push_back(os.str());
        continue;
      }
      resolved[spec.key] = v;
    } else if (spec.required) {
      errors.push_back(std::string("missing required parameter '") + spec.key + "'");
    } else if (!spec.default_value.is_null()) {
      resolved[spec.key] = spec.default_value;
    }
  }
  return resolved;
}

class CsvWriter {
 public:
  explicit CsvWriter(const std::string& path) : out_(path) {
    if (!out_) throw ConfigError("cannot open output file " + path);
  }
  void header(const std::vector<std::string>& cols) {
    for (size_t i = 0; i < cols.size(); ++i) out_ << (i ? "," : "") << cols[i];
    out_ << "\n";
  }
  void row(const std::vector<std::string>& cells) {
    for (size_t i = 0; i < cells.size(); ++i) out_ << (i ? "," : "") << cells[i];
    out_ << "\n";
  }
  static std::string num(double x) { return format_full(x); }

 private:
  std::ofstream out_;
};

std::vector<double> geom_range(double lo, double hi, int n) {
  if (!(lo > 0.0) || !(hi > lo) || n < 2) throw ValidationError("bad geometric range");
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) {
    out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  }
  return out;
}

// ---------------------------------------------------------------------------
// toy-spectrum

void run_toy_spectrum(const json& p, const ExperimentConfig& cfg, json& meta) {
  const double tau = p.at("tau"), sigma = p.at("sigma");
  const int cells = p.at("grid-points");
  const double hw = p.at("grid-halfwidth");
  const int count = p.at("count");
  const Eigen::VectorXd grid = toy::make_grid(-hw, hw, cells);
  const ClassicalState rho = toy::discretize(toy::ToyHamiltonian{tau, 0.0, 0.0}, grid);
  const StochasticChannel channel = build_gaussian_convolution(grid, sigma);
  const RelevancePencil pencil = relevance_operator(rho, channel);
  RelevanceSpectrum spec = solve_spectrum(pencil, std::min(count, pencil.op_dim));
  export_spectrum_csv(spec, cfg.output_path);

  json closed = json::array(), overlaps = json::array();
  for (int n = 0; n < spec.etas.size(); ++n) {
    closed.push_back(toy::toy_exact_relevance(n, tau, sigma));
    const Eigen::VectorXd ref = omega_apply(rho, toy::hermite_reference(n, tau, grid));
    const double num = inner_product(rho, spec.features.col(n), ref);
    const double den = std::sqrt(inner_product(rho, ref, ref));
    overlaps.push_back(std::abs(num) / den);  // computed features are unit norm
  }
  meta["closed-form-etas"] = closed;
  meta["hermite-overlaps"] = overlaps;
  meta["pencil-asymmetry"] = pencil.asymmetry_f;
  meta["jitter-used"] = spec.jitter_used;
}

// ---------------------------------------------------------------------------
// toy-rgflow

void run_toy_rgflow(const json& p, const ExperimentConfig& cfg, json& meta) {
  const double lambda_phys = p.at("lambda-phys"), tau_phys = p.at("tau-phys");
  std::vector<double> eps_grid;
  if (p.contains("eps-grid")) {
    for (const auto& v : p.at("eps-grid")) eps_grid.push_back(v.get<double>());
  } else {
    const double eps_max = p.at("eps-max");
    const int steps = p.at("eps-steps");
    for (int i = 0; i < steps; ++i) eps_grid.push_back(eps_max * i / (steps - 1));
  }
  const toy::FlowRecord rec = toy::flow_trace(lambda_phys, tau_phys, eps_grid);
  toy::write_flow_csv(rec, cfg.output_path);

  Eigen::VectorXd le(rec.eps6.size());
  for (int i = 0; i < rec.eps6.size(); ++i) le(i) = rec.eps6(i);
  meta["lambda-slope-fit"] = fit_line(le, rec.lambda).slope;
  meta["tau-rel-slope-fit"] = fit_line(le, rec.tau / rec.tau_bare0).slope;
  meta["tau-bare0"] = rec.tau_bare0;
  meta["invariant-m2"] = rec.invariants.order(2);
  meta["invariant-m4"] = rec.invariants.order(4);

  if (p.at("fit-coefficients").get<bool>()) {
    const toy::RgCoefficients rg = toy::rg_coefficients();
    meta["rg-dlambda-deps"] = rg.dlambda_deps;
    meta["rg-dtau-dlambda"] = rg.dtau_dlambda_rel;
    meta["rg-dtau-deps"] = rg.dtau_deps_rel;
    meta["rg-cross-term"] = rg.cross_term;
  }

  if (p.at("check-equivalence").get<bool>()) {
    // every row must agree with row 0 on the retained observables of the
    // sigma = tau reference spectrum at threshold 4
    const Eigen::VectorXd grid = toy::make_grid(-7.0 * tau_phys, 7.0 * tau_phys, 700);
    const ClassicalState ref = toy::discretize(toy::ToyHamiltonian{rec.tau_bare0, 0.0, 0.0}, grid);
    const StochasticChannel channel = build_gaussian_convolution(grid, tau_phys);
    RelevanceSpectrum spec = solve_spectrum(relevance_operator(ref, channel), 8);
    set_threshold_by_index(spec, 4);
    const ClassicalState row0 = toy::discretize(
        toy::ToyHamiltonian{rec.tau(0), rec.lambda(0), rec.eps6(0)}, grid);
    bool all_ok = true;
    double worst = 0.0;
    for (int i = 1; i < rec.eps6.size(); ++i) {
      const ClassicalState rown = toy::discretize(
          toy::ToyHamiltonian{rec.tau(i), rec.lambda(i), rec.eps6(i)}, grid);
      const auto w = equivalent_first_order(spec, row0.probs(), rown.probs(), 1e-4);
      all_ok = all_ok && w.equivalent;
      worst = std::max(worst, std::abs(w.worst_value));
    }
    meta["rows-first-order-equivalent"] = all_ok;
    meta["equivalence-worst-deviation"] = worst;
  }
}

// ---------------------------------------------------------------------------
// field-relevance

void run_field_relevance(const json& p, const ExperimentConfig& cfg, json& meta) {
  const gauss::FieldLattice lat(p.at("d"), p.at("spacing"), p.at("extent"));
  const gauss::ClassicalFieldTheory th{p.at("beta"), p.at("m")};
  const std::string sweep = p.at("sweep");
  const bool do_fit = p.at("fit");

  CsvWriter csv(cfg.output_path);
  if (sweep == "sigma") {
    const auto sigmas = geom_range(p.at("sigma-min"), p.at("sigma-max"), p.at("points"));
    const double h = p.at("h");
    csv.header({"sigma", "eta_phi2", "eta_phi_laplacian_phi"});
    std::vector<double> e2(sigmas.size()), el(sigmas.size());
    parallel_for(static_cast<int>(sigmas.size()), [&](int i) {
      gauss::SmearingParams sm;
      sm.sigma = sigmas[i];
      sm.h = h;
      e2[i] = gauss::phi_squared_relevance(lat, th, sm);
      el[i] = gauss::phi_laplacian_relevance(lat, th, sm);
    });
    for (size_t i = 0; i < sigmas.size(); ++i) {
      csv.row({CsvWriter::num(sigmas[i]), CsvWriter::num(e2[i]), CsvWriter::num(el[i])});
    }
    if (do_fit) {
      meta["slope-phi2"] =
          gauss::scaling_exponent(gauss::FieldObservable::phi2, lat, th, h, sigmas).slope;
      meta["slope-phi-laplacian-phi"] =
          gauss::scaling_exponent(gauss::FieldObservable::phi_laplacian_phi, lat, th, h, sigmas)
              .slope;
    }
  } else if (sweep == "h") {
    const auto hs = geom_range(p.at("h-min"), p.at("h-max"), p.at("points"));
    const double sigma = p.at("sigma");
    csv.header({"h", "eta_phi2", "eta_phi_laplacian_phi"});
    std::vector<double> e2(hs.size()), el(hs.size());
    parallel_for(static_cast<int>(hs.size()), [&](int i) {
      gauss::SmearingParams sm;
      sm.sigma = sigma;
      sm.h = hs[i];
      e2[i] = gauss::phi_squared_relevance(lat, th, sm);
      el[i] = gauss::phi_laplacian_relevance(lat, th, sm);
    });
    for (size_t i = 0; i < hs.size(); ++i) {
      csv.row({CsvWriter::num(hs[i]), CsvWriter::num(e2[i]), CsvWriter::num(el[i])});
    }
    if (do_fit) {
      meta["h-slope-phi2"] =
          gauss::scaling_exponent_in_h(gauss::FieldObservable::phi2, lat, th, sigma, hs).slope;
    }
  } else {
    throw ValidationError("field-relevance: sweep must be 'sigma' or 'h'");
  }
}

void conventions_field(const json& p, std::vector<std::string>& out) {
  (void)p;
  out.push_back("smearing kernel normalization N(sigma) = 1 (region-averaging form disabled)");
  out.push_back("covariance rule a_k = beta (k^2 + m^2)");
}

// ---------------------------------------------------------------------------
// qfield-relevance

void run_qfield_relevance(const json& p, const ExperimentConfig& cfg, json& meta) {
  const gauss::QFieldState st{p.at("beta"), p.at("m")};
  gauss::QFieldSmearing sm;
  sm.sigma = p.at("sigma");
  sm.h_phi = p.at("h-phi");
  sm.h_pi = p.at("h-pi");
  sm.pi_uses_h_pi = p.at("pi-uses-h-pi");
  const auto ks = geom_range(p.at("k-min"), p.at("k-max"), p.at("points"));
  CsvWriter csv(cfg.output_path);
  csv.header({"k", "eta_phi", "eta_pi"});
  for (double k : ks) {
    const auto [ephi, epi] = gauss::qfield_mode_relevance(k, st, sm);
    csv.row({CsvWriter::num(k), CsvWriter::num(ephi), CsvWriter::num(epi)});
  }
  meta["asymptotic-regime"] = sm.h_phi * sm.h_pi;
}

void conventions_qfield(const json& p, std::vector<std::string>& out) {
  const bool toggle = p.value("pi-uses-h-pi", false);
  out.push_back(toggle ? "eta(Pi_k) denominator uses h_pi (substituted form)"
                       : "eta(Pi_k) denominator uses h_phi (as printed)");
  out.push_back("formulas are asymptotic for h_phi * h_pi >> 1");
}

// ---------------------------------------------------------------------------
// particle-relevance

void run_particle_relevance(const json& p, const ExperimentConfig& cfg, json& meta) {
  const gauss::QuantumGaussianState st{p.at("u"), p.at("v"), 0.0, 0.0};
  const double sx = p.at("sigma-x"), sp = p.at("sigma-p");
  const auto r = gauss::quantum_particle_relevance(st, sx, sp);
  CsvWriter csv(cfg.output_path);
  std::vector<std::string> cols{"u",          "v",          "sigma_x",     "sigma_p",
                                "eta_x",      "eta_p",      "eta_x_exact", "eta_p_exact",
                                "quad_eta_x", "quad_eta_p"};
  std::vector<std::string> vals{
      CsvWriter::num(st.u),          CsvWriter::num(st.v),       CsvWriter::num(sx),
      CsvWriter::num(sp),            CsvWriter::num(r.eta_x),    CsvWriter::num(r.eta_p),
      CsvWriter::num(r.eta_x_exact), CsvWriter::num(r.eta_p_exact),
      CsvWriter::num(r.quad_eta_x),  CsvWriter::num(r.quad_eta_p)};
  if (p.at("oracle").get<bool>()) {
    if (st.u != st.v || sx != sp) {
      throw ValidationError(
          "particle-relevance: the Fock oracle covers the isotropic case u = v, "
          "sigma_x = sigma_p only");
    }
    gauss::FockOracleParams fp;
    fp.cutoff = p.at("oracle-cutoff");
    const auto oracle = gauss::fock_gaussian_pencil(st.u * st.v, sx, fp);
    cols.insert(cols.end(), {"oracle_eta_x", "oracle_eta_thermal", "oracle_eta_squeeze"});
    vals.push_back(CsvWriter::num(oracle.eta_linear()));
    vals.push_back(CsvWriter::num(oracle.eta_quadratic_thermal()));
    vals.push_back(CsvWriter::num(oracle.eta_quadratic_squeeze()));
    meta["oracle-ambient"] = oracle.ambient;
    meta["oracle-cutoff"] = oracle.cutoff;
  }
  csv.header(cols);
  csv.row(vals);
}

void conventions_particle(const json& p, std::vector<std::string>& out) {
  out.push_back("channel convention: u^2 -> u^2 + sigma_p^2, v^2 -> v^2 + sigma_x^2");
  if (p.value("oracle", false)) {
    std::ostringstream os;
    os << "Fock oracle truncation N = " << p.value("oracle-cutoff", 40)
       << " (convergence-checked against N + 20)";
    out.push_back(os.str());
  }
}

// ---------------------------------------------------------------------------
// mass-shell

void run_mass_shell(const json& p, const ExperimentConfig& cfg, json& meta) {
  const int d = p.at("d");
  const double m = p.at("m"), lambda = p.at("lambda");
  const double uv = p.at("uv"), ir = p.at("ir");
  const std::string measure_name = p.at("measure");
  const auto measure = measure_name == "single_ray" ? gauss::RadialMeasure::single_ray
                                                    : gauss::RadialMeasure::two_ray;
  if (measure_name != "single_ray" && measure_name != "two_ray") {
    throw ValidationError("mass-shell: measure must be 'two_ray' or 'single_ray'");
  }
  const double m2 = gauss::mass_shell_shift(m, lambda, uv, ir, d, measure);
  CsvWriter csv(cfg.output_path);
  csv.header({"d", "m", "lambda", "uv", "ir", "m_phys2"});
  csv.row({std::to_string(d), CsvWriter::num(m), CsvWriter::num(lambda), CsvWriter::num(uv),
           CsvWriter::num(ir), CsvWriter::num(m2)});
  if (d == 1) {
    const double ray = measure == gauss::RadialMeasure::two_ray ? 2.0 : 1.0;
    meta["closed-form-m-phys2"] =
        m * m + 0.5 * lambda * ray * 0.5 * (std::asinh(uv / m) - std::asinh(ir / m));
  }
  meta["measure"] = measure_name;
}

void conventions_mass_shell(const json& p, std::vector<std::string>& out) {
  out.push_back("radial measure Omega_{d-1} k^{d-1} dk; d = 1 default counts both rays");
  out.push_back("measure = " + p.value("measure", std::string("two_ray")));
  out.push_back("zero-temperature shell: <phi_k phi_{-k'}> = delta(k+k')/(2 omega_k)");
}

// ---------------------------------------------------------------------------
// quantum-props

void run_quantum_props(const json& p, const ExperimentConfig& cfg, json& meta) {
  props::PropertyConfig pc;
  pc.seed = cfg.seed.value();
  pc.trials_per_dim = p.at("trials");
  if (p.contains("dims")) {
    pc.dims.clear();
    for (const auto& v : p.at("dims")) pc.dims.push_back(v.get<int>());
  } else if (p.contains("dim")) {
    pc.dims = {p.at("dim").get<int>()};
  }
  const auto report = props::run_quantum_property_suite(pc);
  props::write_report_csv(report, cfg.output_path);
  meta["total-violations"] = report.total_violations;
  meta["failures"] = report.failures;
  if (report.total_violations > 0) {
    std::ostringstream os;
    os << "quantum-props: " << report.total_violations << " invariant violation(s); first: "
       << (report.failures.empty() ? "?" : report.failures.front());
    throw NumericError(os.str());
  }
}

void conventions_props(const json& p, std::vector<std::string>& out) {
  (void)p;
  out.push_back("relevance bound slack 1e-9; adjoint identity 1e-9; omega oracle 1e-10");
  out.push_back(
      "relative-entropy expansion S = (1/2) eps^2 <X,X> + O(eps^3); slope threshold 2.9");
}

// ---------------------------------------------------------------------------
// equivalence-demo

void run_equivalence_demo(const json& p, const ExperimentConfig& cfg, json& meta) {
  const std::string mode = p.at("mode");
  CsvWriter csv(cfg.output_path);
  if (mode == "partial_trace") {
    if (!cfg.seed) {
      throw ValidationError("equivalence-demo: partial_trace mode is randomized and needs a seed");
    }
    props::Rng rng(cfg.seed.value());
    std::vector<int> dims;
    for (const auto& v : p.at("dims")) dims.push_back(v.get<int>());
    if (dims.size() != 2) {
      throw ValidationError("equivalence-demo: partial_trace mode expects two subsystems");
    }
    const int trials = p.at("trials");
    const KrausChannel channel = partial_trace_channel(dims, {0});
    csv.header({"trial", "max_eigenvalue_deviation", "unit_eigenspace_residual"});
    double worst_eig = 0.0, worst_res = 0.0;
    for (int t = 0; t < trials; ++t) {
      const DensityMatrix rho_a = props::random_density(dims[0], rng);
      const DensityMatrix rho_b = props::random_density(dims[1], rng);
      const DensityMatrix rho(kron(rho_a.matrix(), rho_b.matrix()));
      const RelevancePencil pencil = relevance_operator(rho, channel);
      const RelevanceSpectrum spec = solve_spectrum(pencil, pencil.op_dim);
      // spectrum must be {1 x dimA^2, 0 x rest}
      double dev = 0.0;
      const int unit_count = dims[0] * dims[0];
      for (int i = 0; i < spec.etas.size(); ++i) {
        dev = std::max(dev, i < unit_count ? std::abs(spec.etas(i) - 1.0) : spec.etas(i));
      }
      // the eta = 1 eigenfeatures must span {Omega_rho(A (x) 1)}
      const Eigen::MatrixXd top = spec.features.leftCols(unit_count);
      double res = 0.0;
      for (const auto& basis_a : hermitian_basis(dims[0])) {
        const Eigen::MatrixXcd lifted = omega_apply(
            rho, kron(basis_a, Eigen::MatrixXcd::Identity(dims[1], dims[1])));
        Eigen::VectorXd y = to_basis_coords(lifted);
        y /= std::sqrt(y.dot(pencil.k * y));
        Eigen::VectorXd proj = Eigen::VectorXd::Zero(y.size());
        for (int c = 0; c < top.cols(); ++c) {
          proj += (top.col(c).dot(pencil.k * y)) * top.col(c);
        }
        const Eigen::VectorXd r = y - proj;
        res = std::max(res, std::sqrt(std::abs(r.dot(pencil.k * r))));
      }
      csv.row({std::to_string(t), CsvWriter::num(dev), CsvWriter::num(res)});
      worst_eig = std::max(worst_eig, dev);
      worst_res = std::max(worst_res, res);
    }
    meta["worst-eigenvalue-deviation"] = worst_eig;
    meta["worst-unit-eigenspace-residual"] = worst_res;
  } else if (mode == "moments") {
    const double tau = p.at("tau");
    const double lambda_phys = p.at("lambda-phys");
    const double eps_demo = p.at("eps-demo");
    const double tol = p.at("tol");
    const toy::FlowRecord rec = toy::flow_trace(lambda_phys, tau, {0.0, eps_demo});
    const Eigen::VectorXd grid = toy::make_grid(-7.0 * tau, 7.0 * tau, 700);
    const ClassicalState s0 = toy::discretize(
        toy::ToyHamiltonian{rec.tau(0), rec.lambda(0), rec.eps6(0)}, grid);
    const ClassicalState s1 = toy::discretize(
        toy::ToyHamiltonian{rec.tau(1), rec.lambda(1), rec.eps6(1)}, grid);
    const ClassicalState ref = toy::discretize(toy::ToyHamiltonian{rec.tau_bare0, 0.0, 0.0}, grid);
    const StochasticChannel channel = build_gaussian_convolution(grid, tau);
    RelevanceSpectrum spec = solve_spectrum(relevance_operator(ref, channel), 8);
    csv.header({"threshold", "equivalent", "worst_index", "worst_value"});
    for (int n : {4, 6}) {
      set_threshold_by_index(spec, n);
      const auto w = equivalent_first_order(spec, s0.probs(), s1.probs(), tol);
      csv.row({std::to_string(n), w.equivalent ? "true" : "false", std::to_string(w.worst_index),
               CsvWriter::num(w.worst_value)});
      meta["equivalent-at-" + std::to_string(n)] = w.equivalent;
    }
  } else {
    throw ValidationError("equivalence-demo: mode must be 'partial_trace' or 'moments'");
  }
}

// ---------------------------------------------------------------------------

const std::vector<ExperimentDef>& registry() {
  static const std::vector<ExperimentDef> defs = {
      {"toy-spectrum",
       false,
       {{"tau", ParamType::number, false, 1e-6, 1e6, 1.0, "width of the reference state"},
        {"sigma", ParamType::number, false, 1e-9, 1e6, 1.0, "convolution noise"},
        {"grid-points", ParamType::integer, false, 8, 4096, 600, "grid cells"},
        {"grid-halfwidth", ParamType::number, false, 1e-3, 1e6, 12.0, "grid half width"},
        {"count", ParamType::integer, false, 1, 4096, 8, "spectrum rows to export"}},
       run_toy_spectrum,
       nullptr},
      {"toy-rgflow",
       false,
       {{"lambda-phys", ParamType::number, false, -1.0, 1.0, 0.01, "physical quartic coupling"},
        {"tau-phys", ParamType::number, false, 1e-6, 1e6, 1.0, "physical width"},
        {"eps-max", ParamType::number, false, 0.0, 1.0, 0.002, "largest regulator"},
        {"eps-steps", ParamType::integer, false, 2, 1000, 5, "grid points"},
        {"eps-grid", ParamType::array, false, 0, 0, nullptr, "explicit regulator grid"},
        {"fit-coefficients", ParamType::boolean, false, 0, 0, true,
         "extract first-order response coefficients"},
        {"check-equivalence", ParamType::boolean, false, 0, 0, true,
         "verify rows share the retained observables"}},
       run_toy_rgflow,
       nullptr},
      {"field-relevance",
       false,
       {{"d", ParamType::integer, false, 1, 3, 1, "spatial dimension"},
        {"extent", ParamType::integer, false, 2, 1 << 20, 4096, "sites per dimension"},
        {"spacing", ParamType::number, false, 1e-9, 1e6, 0.05, "lattice spacing"},
        {"beta", ParamType::number, false, 1e-9, 1e9, 1.0, "inverse temperature"},
        {"m", ParamType::number, false, 0.0, 1e9, 1.0, "mass"},
        {"h", ParamType::number, false, 0.0, 1e9, 4.0, "field-value uncertainty"},
        {"sigma", ParamType::number, false, 1e-9, 1e9, 8.0, "smearing (h sweep only)"},
        {"sweep", ParamType::string, false, 0, 0, "sigma", "'sigma' or 'h'"},
        {"sigma-min", ParamType::number, false, 1e-9, 1e9, 4.0, ""},
        {"sigma-max", ParamType::number, false, 1e-9, 1e9, 16.0, ""},
        {"h-min", ParamType::number, false, 1e-9, 1e9, 4.0, ""},
        {"h-max", ParamType::number, false, 1e-9, 1e9, 16.0, ""},
        {"points", ParamType::integer, false, 3, 200, 7, "sweep points"},
        {"fit", ParamType::boolean, false, 0, 0, true, "report log-log slopes"}},
       run_field_relevance,
       conventions_field},
      {"qfield-relevance",
       false,
       {{"beta", ParamType::number, false, 1e-9, 1e9, 1.0, ""},
        {"m", ParamType::number, false, 0.0, 1e9, 1.0, ""},
        {"sigma", ParamType::number, false, 0.0, 1e9, 1.0, ""},
        {"h-phi", ParamType::number, false, 0.0, 1e9, 10.0, ""},
        {"h-pi", ParamType::number, false, 0.0, 1e9, 10.0, ""},
        {"pi-uses-h-pi", ParamType::boolean, false, 0, 0, false,
         "substitute h_pi in the Pi denominator"},
        {"k-min", ParamType::number, false, 1e-9, 1e9, 0.1, ""},
        {"k-max", ParamType::number, false, 1e-9, 1e9, 5.0, ""},
        {"points", ParamType::integer, false, 2, 10000, 25, ""}},
       run_qfield_relevance,
       conventions_qfield},
      {"particle-relevance",
       false,
       {{"u", ParamType::number, false, 1e-9, 1e9, std::sqrt(3.0), ""},
        {"v", ParamType::number, false, 1e-9, 1e9, std::sqrt(3.0), ""},
        {"sigma-x", ParamType::number, false, 0.0, 1e9, 10.0, ""},
        {"sigma-p", ParamType::number, false, 0.0, 1e9, 10.0, ""},
        {"oracle", ParamType::boolean, false, 0, 0, false, "run the Fock-truncated pencil"},
        {"oracle-cutoff", ParamType::integer, false, 8, 512, 40, "Fock truncation"}},
       run_particle_relevance,
       conventions_particle},
      {"mass-shell",
       false,
       {{"d", ParamType::integer, false, 1, 3, 1, ""},
        {"m", ParamType::number, false, 1e-12, 1e9, 1.0, ""},
        {"lambda", ParamType::number, false, -1e9, 1e9, 0.0, ""},
        {"uv", ParamType::number, false, 0.0, 1e12, 10.0, "UV cutoff 1/eps"},
        {"ir", ParamType::number, false, 0.0, 1e12, 1.0, "IR scale 1/sigma"},
        {"measure", ParamType::string, false, 0, 0, "two_ray", "'two_ray' or 'single_ray'"}},
       run_mass_shell,
       conventions_mass_shell},
      {"quantum-props",
       true,
       {{"dim", ParamType::integer, false, 2, 16, nullptr, "single dimension"},
        {"dims", ParamType::array, false, 0, 0, nullptr, "dimension list (default 2,3,4,6)"},
        {"trials", ParamType::integer, false, 1, 100000, 100, "trials per dimension"}},
       run_quantum_props,
       conventions_props},
      {"equivalence-demo",
       false,
       {{"mode", ParamType::string, false, 0, 0, "moments", "'partial_trace' or 'moments'"},
        {"dims", ParamType::array, false, 0, 0, json::array({2, 2}), "subsystem dimensions"},
        {"trials", ParamType::integer, false, 1, 10000, 50, ""},
        {"tau", ParamType::number, false, 1e-6, 1e6, 1.0, ""},
        {"lambda-phys", ParamType::number, false, -1.0, 1.0, 0.01, ""},
        {"eps-demo", ParamType::number, false, 0.0, 1.0, 0.002, ""},
        {"tol", ParamType::number, false, 0.0, 1.0, 1e-4, "equivalence tolerance"}},
       run_equivalence_demo,
       nullptr},
  };
  return defs;
}

const ExperimentDef& find_experiment(const std::string& name) {
  for (const auto& def : registry()) {
    if (name == def.name) return def;
  }
  throw ValidationError("unknown experiment '" + name + "'");
}

}  // namespace

std::vector<std::string> experiment_names() {
  std::vector<std::string> names;
  for (const auto& def : registry()) names.push_back(def.name);
  return names;
}

ExperimentConfig config_from_json(const json& j) {
  if (!j.is_object()) throw ValidationError("config: expected a JSON object");
  ExperimentConfig cfg;
  for (auto it = j.begin(); it != j.end(); ++it) {
    const std::string& key = it.key();
    if (key == "experiment") {
      cfg.experiment = it.value().get<std::string>();
    } else if (key == "output") {
      cfg.output_path = it.value().get<std::string>();
    } else if (key == "seed") {
      cfg.seed = it.value().get<std::uint64_t>();
    } else if (key == "params") {
      if (!it.value().is_object()) throw ValidationError("config: params must be an object");
      cfg.params = it.value();
    } else {
      throw ValidationError("config: unknown top-level key '" + key + "'");
    }
  }
  return cfg;
}

Diagnostics validate(const ExperimentConfig& cfg) {
  Diagnostics d;
  if (cfg.experiment.empty()) {
    d.errors.push_back("missing experiment name");
    d.ok = false;
    return d;
  }
  const ExperimentDef* def = nullptr;
  try {
    def = &find_experiment(cfg.experiment);
  } catch (const ValidationError& e) {
    d.errors.push_back(e.what());
    d.ok = false;
    return d;
  }
  const json resolved = check_params(*def, cfg.params, d.errors);
  if (cfg.output_path.empty()) d.errors.push_back("missing output path");
  if (def->needs_seed && !cfg.seed.has_value()) {
    d.errors.push_back("experiment '" + cfg.experiment + "' is randomized and requires a seed");
  }
  if (cfg.experiment == "equivalence-demo" && !cfg.seed.has_value() &&
      cfg.params.value("mode", "moments") == std::string("partial_trace")) {
    d.errors.push_back("equivalence-demo in partial_trace mode is randomized and requires a seed");
  }
  if (def->conventions) def->conventions(resolved, d.conventions);
  if (cfg.experiment == "toy-spectrum" && d.errors.empty()) {
    const double dx =
        2.0 * resolved.at("grid-halfwidth").get<double>() / resolved.at("grid-points").get<int>();
    if (resolved.at("sigma").get<double>() < 3.0 * dx) {
      std::ostringstream os;
      os << "sigma " << resolved.at("sigma").get<double>() << " is below 3x the grid spacing "
         << dx << "; the discretized convolution will be rejected";
      d.warnings.push_back(os.str());
    }
  }
  d.ok = d.errors.empty();
  return d;
}

std::string metadata_path_for(const std::string& csv_path) {
  const auto dot = csv_path.find_last_of('.');
  const auto slash = csv_path.find_last_of('/');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
    return csv_path + ".meta.json";
  }
  return csv_path.substr(0, dot) + ".meta.json";
}

void run(const ExperimentConfig& cfg) {
  const ExperimentDef& def = find_experiment(cfg.experiment);
  Diagnostics d = validate(cfg);
  if (!d.ok) {
    std::ostringstream os;
    os << "invalid configuration:";
    for (const auto& e : d.errors) os << "\n  " << e;
    throw ValidationError(os.str());
  }
  std::vector<std::string> errors;
  const json resolved = check_params(def, cfg.params, errors);

  json meta;
  meta["experiment"] = cfg.experiment;
  meta["params"] = resolved;
  if (cfg.seed) meta["seed"] = *cfg.seed;
  meta["conventions"] = d.conventions;

  def.runner(resolved, cfg, meta);

  std::ofstream mf(metadata_path_for(cfg.output_path));
  if (!mf) throw ConfigError("cannot open metadata sidecar for " + cfg.output_path);
  mf << meta.dump(2) << "\n";
}

}  // namespace rlab::cli
