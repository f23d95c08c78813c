#include "msfem/harness.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include "msfem/grid_io.hpp"

namespace msfem {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(trim(item));
  return out;
}

int parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  int x = 0;
  try {
    x = std::stoi(v, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw StageError("config", "key '" + key + "': expected an integer, got '" + v + "'");
  return x;
}

/// Accepts plain decimals and fractions "a/b".
double parse_real(const std::string& key, const std::string& v) {
  auto one = [&](const std::string& s) {
    std::size_t used = 0;
    double x = 0.0;
    try {
      x = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != s.size() || !std::isfinite(x))
      throw StageError("config", "key '" + key + "': expected a number, got '" + v + "'");
    return x;
  };
  const auto slash = v.find('/');
  if (slash == std::string::npos) return one(v);
  const double den = one(trim(v.substr(slash + 1)));
  if (den == 0.0) throw StageError("config", "key '" + key + "': zero denominator in '" + v + "'");
  return one(trim(v.substr(0, slash))) / den;
}

const std::set<std::string> kCoefficientParams = {"value", "low", "high", "fraction", "first", "second", "s",
                                                   "grid_file"};
const std::set<std::string> kCoefficients = {"oscillatory",  "constant", "laminate", "sin_laminate",
                                             "checkerboard", "holder",   "locally_periodic", "sampled"};
const std::set<std::string> kSources = {"one", "sinprod", "zero"};

double param(const RunConfig& c, const std::string& key, double fallback) {
  const auto it = c.coefficient_params.find(key);
  return it == c.coefficient_params.end() ? fallback : parse_real(key, it->second);
}

template <class F>
auto in_stage(const std::string& stage, const std::string& context, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const StageError&) {
    throw;
  } catch (const std::exception& e) {
    throw StageError(stage, context.empty() ? e.what() : context + ": " + e.what());
  }
}

std::string row_context(int n_coarse) { return "n_coarse=" + std::to_string(n_coarse); }

/// Everything a row needs before the basis-type specific work.
struct RowSetup {
  std::unique_ptr<TwoScaleMesh> mesh;
  CellCoefficients coeffs;
  EffectiveField kbar;
  CellCoefficients macro;
  std::shared_ptr<const ReferenceSolutions> refs;
  int m = 0;
};

RowSetup setup_row(const RunConfig& config, const CoefficientField& field, const SourceFn& f, int n,
                   ReferenceCache* cache) {
  const std::string ctx = row_context(n);
  RowSetup s;
  const int r = config.refine_for(n);
  s.mesh = in_stage("mesh", ctx, [&] { return std::make_unique<TwoScaleMesh>(n, r); });
  const TwoScaleMesh& mesh = *s.mesh;
  s.coeffs = in_stage("coefficient", ctx, [&] { return eval_cellwise(field, mesh); });
  s.kbar = in_stage("cell", ctx, [&] { return effective_field(field, mesh, config.n_cell); });
  s.macro = s.kbar.realize(mesh);
  s.m = config.m_for(r);

  // u0 depends on the coarse mesh when the effective tensor varies per element.
  const bool cacheable = cache != nullptr && s.kbar.constant;
  if (cacheable) {
    if (const ReferenceSolutions* hit = cache->find(mesh.n_fine())) {
      s.refs = std::make_shared<const ReferenceSolutions>(*hit);
      return s;
    }
  }
  ReferenceSolutions refs;
  refs.u_eps = in_stage("reference", ctx,
                        [&] { return solve_dirichlet_zero(Lattice::whole(mesh), s.coeffs, f, config.cg_tol); });
  refs.u0 = in_stage("homogenized", ctx, [&] { return solve_homogenized(mesh, s.kbar, f, config.cg_tol); });
  if (cacheable) cache->store(mesh.n_fine(), refs);
  s.refs = std::make_shared<const ReferenceSolutions>(std::move(refs));
  return s;
}

BasisLibrary build_library(const RunConfig& config, const RowSetup& s, int n) {
  BasisBuildOptions opts;
  opts.m = s.m;
  opts.type1 = config.type1;
  opts.type2 = config.type2;
  opts.solve.solver = config.local_solver;
  opts.solve.cg_tol = config.cg_tol;
  opts.exterior = config.exterior;
  opts.threads = config.threads;
  return in_stage("basis", row_context(n), [&] { return build_basis_library(*s.mesh, s.coeffs, &s.macro, opts); });
}

std::vector<BasisType> requested_types(const RunConfig& c) {
  std::vector<BasisType> out;
  if (c.type1) out.push_back(BasisType::type1);
  if (c.type2) out.push_back(BasisType::type2);
  return out;
}

std::string build_summary(const RunConfig& config, const ConvergenceResult& result) {
  std::ostringstream out;
  out << "rows = " << result.rows.size() << "\n";
  out << "epsilon = " << format_double(config.epsilon) << "\n";
  out << "m = " << (config.m ? std::to_string(*config.m) : std::string("full")) << "\n";
  for (const auto& w : result.warnings) out << "warning = " << w << "\n";
  for (BasisType t : requested_types(config)) {
    std::vector<double> H, interp, best, pg;
    for (const auto& r : result.rows) {
      if (r.basis_type != t) continue;
      H.push_back(r.H);
      interp.push_back(r.err_interp_energy);
      best.push_back(r.err_bestapprox_energy);
      pg.push_back(r.err_pg_energy);
    }
    const std::string p = to_string(t) + ".";
    auto rate = [&](const char* name, const std::vector<double>& e) {
      out << p << "fit_rate_" << name << " = ";
      try {
        out << format_double(fit_rate(H, e)) << "\n";
      } catch (const InvalidArgument&) {
        out << "n/a\n";
      }
    };
    rate("interp", interp);
    rate("bestapprox", best);
    rate("pg", pg);
    try {
      const ResonanceFit fit = fit_resonance_model(H, interp, config.epsilon);
      out << p << "resonance_a = " << format_double(fit.a) << "\n";
      out << p << "resonance_b = " << format_double(fit.b) << "\n";
      out << p << "resonance_r2 = " << format_double(fit.r2) << "\n";
    } catch (const InvalidArgument&) {
      out << p << "resonance = n/a\n";
    }
  }
  return out.str();
}

void write_text(const std::string& path, const std::string& text) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw StageError("output", "cannot open '" + path + "' for writing");
  out << text;
  if (!out) throw StageError("output", "failed writing '" + path + "'");
}

void write_grid_file(const std::string& path, const Grid& g, std::vector<std::string>& files) {
  const std::filesystem::path p(path);
  if (p.has_parent_path()) std::filesystem::create_directories(p.parent_path());
  in_stage("output", "", [&] { write_grid(path, g); });
  files.push_back(path);
}

Grid nodal_grid(const FineFunction& f) { return {f.lattice.nx + 1, f.lattice.ny + 1, f.values}; }

}  // namespace

int RunConfig::refine_for(int n_coarse) const {
  if (refine > 0) return refine;
  if (n_coarse <= 0 || n_fine % n_coarse != 0)
    throw StageError("config", "n_fine=" + std::to_string(n_fine) + " is not a multiple of n_coarse=" +
                                   std::to_string(n_coarse));
  return n_fine / n_coarse;
}

int RunConfig::m_for(int r) const { return m ? *m : r; }

std::string RunConfig::basis_type_name() const {
  if (type1 && type2) return "both";
  return type1 ? "type1" : "type2";
}

RunConfig parse_config(std::istream& in, const std::string& source_name) {
  RunConfig c;
  std::set<std::string> seen;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    const std::string where = source_name + ":" + std::to_string(lineno);
    if (eq == std::string::npos) throw StageError("config", where + ": expected 'key = value', got '" + line + "'");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) throw StageError("config", where + ": empty key or value");
    if (!seen.insert(key).second) throw StageError("config", where + ": duplicate key '" + key + "'");

    if (key == "n_coarse" || key == "n_coarse_list") {
      c.n_coarse_list.clear();
      for (const auto& item : split(value, ',')) c.n_coarse_list.push_back(parse_int(key, item));
    } else if (key == "refine") {
      c.refine = parse_int(key, value);
    } else if (key == "n_fine") {
      c.n_fine = parse_int(key, value);
    } else if (key == "m") {
      if (value == "full")
        c.m.reset();
      else
        c.m = parse_int(key, value);
    } else if (key == "epsilon") {
      c.epsilon = parse_real(key, value);
    } else if (key == "coefficient") {
      c.coefficient = value;
    } else if (kCoefficientParams.count(key)) {
      if (key != "grid_file") parse_real(key, value);
      c.coefficient_params[key] = value;
    } else if (key == "source") {
      c.source = value;
    } else if (key == "basis_type") {
      if (value == "type1") {
        c.type1 = true;
        c.type2 = false;
      } else if (value == "type2") {
        c.type1 = false;
        c.type2 = true;
      } else if (value == "both") {
        c.type1 = c.type2 = true;
      } else {
        throw StageError("config", where + ": basis_type must be type1, type2 or both, got '" + value + "'");
      }
    } else if (key == "cg_tol") {
      c.cg_tol = parse_real(key, value);
    } else if (key == "n_cell") {
      c.n_cell = parse_int(key, value);
    } else if (key == "output") {
      c.output = value;
    } else if (key == "local_solver") {
      if (value == "cg")
        c.local_solver = LocalSolver::cg;
      else if (value == "direct")
        c.local_solver = LocalSolver::direct;
      else
        throw StageError("config", where + ": local_solver must be cg or direct, got '" + value + "'");
    } else if (key == "exterior_data") {
      if (value == "zero")
        c.exterior = ExteriorData::zero;
      else if (value == "bilinear")
        c.exterior = ExteriorData::bilinear;
      else if (value == "auto")
        c.exterior = ExteriorData::automatic;
      else
        throw StageError("config", where + ": exterior_data must be zero, bilinear or auto, got '" + value + "'");
    } else if (key == "threads") {
      c.threads = parse_int(key, value);
    } else {
      throw StageError("config", where + ": unknown key '" + key + "'");
    }
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw StageError("config", "cannot open config file '" + path + "'");
  return parse_config(in, path);
}

std::vector<std::string> validate_config(const RunConfig& c) {
  auto fail = [](const std::string& msg) { throw StageError("config", msg); };
  if (c.n_coarse_list.empty()) fail("n_coarse must list at least one value");
  if ((c.refine > 0) == (c.n_fine > 0)) fail("exactly one of refine and n_fine must be given (positive)");
  if (!(c.epsilon > 0.0)) fail("epsilon must be positive");
  if (!(c.cg_tol > 0.0 && c.cg_tol < 1.0)) fail("cg_tol must lie in (0, 1)");
  if (c.n_cell < 8) fail("n_cell must be at least 8");
  if (c.threads < 0) fail("threads must be nonnegative");
  if (!kCoefficients.count(c.coefficient)) fail("unknown coefficient '" + c.coefficient + "'");
  if (c.coefficient == "sampled" && !c.coefficient_params.count("grid_file"))
    fail("coefficient 'sampled' needs grid_file");
  if (!kSources.count(c.source)) fail("unknown source '" + c.source + "'");
  if (!c.type1 && !c.type2) fail("no basis type selected");

  std::vector<std::string> warnings;
  for (int n : c.n_coarse_list) {
    if (n < 2) fail("n_coarse values must be at least 2, got " + std::to_string(n));
    const int r = c.refine_for(n);
    if (r < 2) fail("refine must be at least 2 (n_coarse=" + std::to_string(n) + ")");
    const int m = c.m_for(r);
    if (m < 1 || m > r)
      fail("m=" + std::to_string(m) + " must lie in [1, refine=" + std::to_string(r) + "] for n_coarse=" +
           std::to_string(n));
    const double h = 1.0 / (static_cast<double>(n) * r);
    if (c.epsilon < 4.0 * h)
      warnings.push_back("epsilon=" + format_double(c.epsilon) + " < 4h=" + format_double(4.0 * h) +
                         " at n_coarse=" + std::to_string(n) + ": the fine grid under-resolves the oscillation");
  }
  return warnings;
}

CoefficientField make_coefficient(const RunConfig& c) {
  return in_stage("coefficient", "", [&]() -> CoefficientField {
    const double eps = c.epsilon;
    if (c.coefficient == "oscillatory") return make_oscillatory(eps);
    if (c.coefficient == "constant") return make_constant(Tensor2::isotropic(param(c, "value", 1.0)));
    if (c.coefficient == "laminate")
      return make_laminate(param(c, "low", 1.0), param(c, "high", 4.0), eps, param(c, "fraction", 0.5));
    if (c.coefficient == "sin_laminate") return make_sin_laminate(eps);
    if (c.coefficient == "checkerboard") return make_checkerboard(param(c, "first", 1.0), param(c, "second", 4.0), eps);
    if (c.coefficient == "holder" || c.coefficient == "locally_periodic")
      return make_holder_field(eps, param(c, "s", 0.5));
    if (c.coefficient == "sampled")
      return make_periodic(sampled_cell_from_grid(read_grid(c.coefficient_params.at("grid_file"))), eps);
    throw StageError("coefficient", "unknown coefficient '" + c.coefficient + "'");
  });
}

SourceFn make_source(const std::string& id) {
  if (id == "one") return [](Point) { return 1.0; };
  if (id == "zero") return [](Point) { return 0.0; };
  if (id == "sinprod")
    return [](Point p) { return std::sin(std::numbers::pi * p.x) * std::sin(std::numbers::pi * p.y); };
  throw StageError("config", "unknown source '" + id + "'");
}

const ReferenceSolutions* ReferenceCache::find(int n_fine) const {
  const auto it = entries_.find(n_fine);
  return it == entries_.end() ? nullptr : it->second.get();
}

void ReferenceCache::store(int n_fine, ReferenceSolutions solutions) {
  entries_[n_fine] = std::make_shared<const ReferenceSolutions>(std::move(solutions));
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.16e", v);
  return buf;
}

std::string csv_line(const ConvergenceRow& r) {
  std::ostringstream out;
  out << r.n_coarse << ',' << format_double(r.H) << ',' << format_double(r.h) << ',' << r.m << ','
      << format_double(r.epsilon) << ',' << to_string(r.basis_type) << ',' << format_double(r.err_interp_energy)
      << ',' << format_double(r.err_bestapprox_energy) << ',' << format_double(r.err_pg_energy) << ','
      << format_double(r.err_l2_hom) << ',' << format_double(r.max_jump) << ',' << r.lambda << ','
      << r.cg_iters_fine;
  return out.str();
}

ConvergenceResult run_convergence(const RunConfig& config, ReferenceCache* cache) {
  ConvergenceResult result;
  result.warnings = validate_config(config);
  const CoefficientField field = make_coefficient(config);
  const SourceFn f = make_source(config.source);
  ReferenceCache local;
  if (cache == nullptr) cache = &local;

  std::ostringstream csv;
  csv << kCsvHeader << "\n";
  for (int n : config.n_coarse_list) {
    const std::string ctx = row_context(n);
    const RowSetup s = setup_row(config, field, f, n, cache);
    const TwoScaleMesh& mesh = *s.mesh;
    const FineFunction& ueps = s.refs->u_eps.u;
    const FineFunction& u0 = s.refs->u0.u;
    const int lambda = in_stage("mesh", ctx, [&] { return overlap_count(mesh, s.m); });
    const BasisLibrary lib = build_library(config, s, n);

    const double l2 = in_stage("l2", ctx, [&] { return l2_error(mesh, ueps, restrict_to_elements(mesh, u0)); });
    const double q1_err = in_stage("standard_q1", ctx, [&] {
      const CoarseSolveResult q1 = solve_standard_q1(mesh, s.coeffs, f);
      return broken_energy_error(mesh, s.coeffs, ueps, q1.solution.realization);
    });

    for (BasisType t : requested_types(config)) {
      const std::vector<PatchBasisSet>& sets = lib.of(t);
      const std::string tctx = ctx + " " + to_string(t);
      ConvergenceRow row;
      row.n_coarse = n;
      row.H = mesh.H();
      row.h = mesh.h();
      row.m = s.m;
      row.epsilon = config.epsilon;
      row.basis_type = t;
      row.lambda = lambda;
      row.cg_iters_fine = s.refs->u_eps.iterations;
      row.err_l2_hom = l2;
      row.standard_q1_energy = q1_err;

      const InterpolantResult interp = in_stage("interpolant", tctx, [&] { return global_interpolant(mesh, sets, u0); });
      row.err_interp_energy = broken_energy_error(mesh, s.coeffs, ueps, interp.w.realization);
      row.max_jump = interface_jump_max(mesh, interp.w.realization).max;
      row.max_jump_u_hat = interface_jump_max(mesh, interp.u_hat).max;

      row.err_bestapprox_energy =
          in_stage("best_approximation", tctx, [&] { return best_approximation(mesh, sets, s.coeffs, ueps).error; });
      const CoarseSolveResult pg =
          in_stage("petrov_galerkin", tctx, [&] { return assemble_petrov_galerkin(mesh, sets, s.coeffs, f); });
      row.err_pg_energy = broken_energy_error(mesh, s.coeffs, ueps, pg.solution.realization);
      row.pg_rcond = pg.rcond;

      for (const auto& set : sets) row.lagrange_deviation = std::max(row.lagrange_deviation, lagrange_deviation(mesh, set));
      row.partition_of_unity_deviation = partition_of_unity_deviation(sets);
      row.max_basis_energy = max_basis_energy(mesh, sets, s.coeffs);

      csv << csv_line(row) << "\n";
      result.rows.push_back(row);
    }
  }
  result.csv = csv.str();
  result.summary = build_summary(config, result);
  return result;
}

void write_convergence_outputs(const RunConfig& config, const ConvergenceResult& result) {
  if (config.output.empty()) return;
  write_text(config.output, result.csv);
  write_text(config.output + ".summary.txt", result.summary);
}

CellRunResult run_cell(const RunConfig& config) {
  if (!(config.epsilon > 0.0)) throw StageError("config", "epsilon must be positive");
  if (config.n_cell < 8) throw StageError("config", "n_cell must be at least 8");
  const CoefficientField field = make_coefficient(config);
  CellRunResult out;
  const CellCoefficients unit = in_stage("coefficient", "", [&] {
    return eval_unit_cell(field.frozen_at({0.5, 0.5}), config.n_cell);
  });
  out.cell = in_stage("cell", "", [&] { return solve_cell_problems(unit); });
  out.raw_matrix = effective_matrix(out.cell, unit);
  out.kappa_bar = effective_tensor(out.cell, unit);
  if (!config.output.empty()) {
    write_grid_file(config.output + "_kappa_bar.grid", tensor_grid(out.kappa_bar), out.files);
    write_grid_file(config.output + "_chi1.grid", corrector_grid(out.cell, 1), out.files);
    write_grid_file(config.output + "_chi2.grid", corrector_grid(out.cell, 2), out.files);
  }
  return out;
}

BasisDumpResult run_basis_dump(const RunConfig& config, int element) {
  validate_config(config);
  const CoefficientField field = make_coefficient(config);
  const int n = config.n_coarse_list.front();
  const std::string ctx = row_context(n);
  const TwoScaleMesh mesh = in_stage("mesh", ctx, [&] { return TwoScaleMesh(n, config.refine_for(n)); });
  if (element < 0 || element >= mesh.num_elements())
    throw StageError("element", "element " + std::to_string(element) + " outside [0, " +
                                    std::to_string(mesh.num_elements() - 1) + "]");
  const CellCoefficients coeffs = in_stage("coefficient", ctx, [&] { return eval_cellwise(field, mesh); });
  const int m = config.m_for(mesh.refine());
  LocalSolveOptions opts{config.local_solver, config.cg_tol};

  BasisDumpResult out;
  out.patch = oversample_patch(mesh, element, m);
  const bool bilinear = config.exterior == ExteriorData::bilinear ||
                        (config.exterior == ExteriorData::automatic && zero_data_degenerate(mesh, out.patch));
  out.phi = in_stage("basis", ctx, [&] { return intermediate_bases(mesh, out.patch, coeffs, opts, bilinear); });
  auto phi = std::make_shared<const IntermediateBases>(out.phi);
  if (config.type1) out.sets.emplace_back(BasisType::type1, in_stage("basis", ctx, [&] {
                                            return type1_basis(mesh, out.patch, phi, bilinear);
                                          }));
  if (config.type2) {
    const EffectiveField kbar = in_stage("cell", ctx, [&] { return effective_field(field, mesh, config.n_cell); });
    const CellCoefficients macro = kbar.realize(mesh);
    auto phi_bar = std::make_shared<const IntermediateBases>(
        in_stage("basis", ctx, [&] { return intermediate_bases(mesh, out.patch, macro, opts, bilinear); }));
    out.sets.emplace_back(BasisType::type2, in_stage("basis", ctx, [&] {
                            return type2_basis(mesh, out.patch, phi, phi_bar, bilinear);
                          }));
  }

  if (!config.output.empty()) {
    for (int j = 0; j < 4; ++j)
      write_grid_file(config.output + "_phi" + std::to_string(j) + ".grid",
                      nodal_grid(out.phi[static_cast<std::size_t>(j)]), out.files);
    for (const auto& [type, set] : out.sets) {
      if (type == BasisType::type2)
        for (int j = 0; j < 4; ++j)
          write_grid_file(config.output + "_phibar" + std::to_string(j) + ".grid",
                          nodal_grid((*set.phi_bar)[static_cast<std::size_t>(j)]), out.files);
      for (int p = 0; p < 4; ++p)
        if (set.active[static_cast<std::size_t>(p)])
          write_grid_file(config.output + "_" + to_string(type) + "_basis" + std::to_string(p) + ".grid",
                          nodal_grid(set.basis(p)), out.files);
    }
  }
  return out;
}

JumpResult run_jumps(const RunConfig& config, ReferenceCache* cache) {
  validate_config(config);
  const CoefficientField field = make_coefficient(config);
  const SourceFn f = make_source(config.source);
  ReferenceCache local;
  if (cache == nullptr) cache = &local;

  JumpResult out;
  std::ostringstream csv;
  csv << "n_coarse,basis_type,edge_id,orientation,start_i,start_j,jump_u_hat,jump_w\n";
  for (int n : config.n_coarse_list) {
    const RowSetup s = setup_row(config, field, f, n, cache);
    const TwoScaleMesh& mesh = *s.mesh;
    const BasisLibrary lib = build_library(config, s, n);
    for (BasisType t : requested_types(config)) {
      const InterpolantResult interp = in_stage("interpolant", row_context(n) + " " + to_string(t),
                                                [&] { return global_interpolant(mesh, lib.of(t), s.refs->u0.u); });
      const JumpReport ju = interface_jump_max(mesh, interp.u_hat);
      const JumpReport jw = interface_jump_max(mesh, interp.w.realization);
      for (std::size_t k = 0; k < mesh.interior_edges().size(); ++k) {
        JumpRow row{n, t, mesh.interior_edges()[k], ju.per_edge[k], jw.per_edge[k]};
        csv << n << ',' << to_string(t) << ',' << row.edge.id << ','
            << (row.edge.orientation == EdgeOrientation::vertical ? "vertical" : "horizontal") << ','
            << row.edge.start.i << ',' << row.edge.start.j << ',' << format_double(row.jump_u_hat) << ','
            << format_double(row.jump_w) << "\n";
        out.rows.push_back(row);
      }
    }
  }
  out.csv = csv.str();
  return out;
}

}  // namespace msfem
