// Command-line driver: resonance searches, discrete spectra, scattering
// curves, trace-identity checks, the radial oracle, and the identity suite.
// The config file is the single source of truth for physics parameters;
// flags only steer infrastructure.  Outputs are deterministic: no
// timestamps, fixed iteration orders, full-precision formatting.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include <diracres/cache.hpp>
#include <diracres/config.hpp>
#include <diracres/dirac_algebra.hpp>
#include <diracres/jump.hpp>
#include <diracres/radial.hpp>
#include <diracres/records.hpp>
#include <diracres/resolvent.hpp>
#include <diracres/scattering.hpp>
#include <diracres/trace.hpp>
#include <diracres/zerosearch.hpp>

namespace {

using namespace diracres;
namespace fs = std::filesystem;

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw std::runtime_error("cannot write " + p.string());
  f << content;
}

// Cached 3D determinant as a function of lambda on a fixed sheet.
DetFn make_cached_detfn(const Workspace& ws, Sheet sheet, DetCache* cache) {
  const std::string phash = potential_hash(ws.V);
  const std::string ghash = ws.quad.hash;
  return [&ws, sheet, cache, phash, ghash](Complex z) {
    const std::string key = DetCache::make_key(phash, ghash, sheet, z);
    if (cache) {
      if (const auto hit = cache->lookup(key)) return hit->value();
    }
    const NystromOperator K = assemble_K(sheeted(z, sheet), ws.V, ws.chi, ws.quad);
    const LogDet ld = logdet_lu(K.matrix + CMat::Identity(K.matrix.rows(),
                                                          K.matrix.cols()));
    if (cache) cache->store(key, ld);
    return ld.value();
  };
}

int cmd_resonances(const RunConfig& cfg, const fs::path& out, bool use_cache) {
  const Workspace ws = make_workspace(cfg);
  DetCache cache;
  if (use_cache) cache.open((out / "det_cache.jsonl").string());
  const DetFn det =
      make_cached_detfn(ws, cfg.region.sheet, use_cache ? &cache : nullptr);
  const std::vector<Resonance> found =
      find_resonances(det, cfg.region, cfg.find);
  if (use_cache) cache.flush();
  write_file(out / "resonances.csv", resonance_csv(found));

  nlohmann::json log;
  log["region"] = {{"re_min", cfg.region.re_min},
                   {"re_max", cfg.region.re_max},
                   {"im_min", cfg.region.im_min},
                   {"im_max", cfg.region.im_max},
                   {"sheet", to_string(cfg.region.sheet)}};
  log["found"] = found.size();
  int msum = 0;
  nlohmann::json items = nlohmann::json::array();
  for (const Resonance& r : found) {
    msum += r.multiplicity;
    items.push_back({{"re", r.lambda.real()},
                     {"im", r.lambda.imag()},
                     {"multiplicity", r.multiplicity},
                     {"residual", r.residual},
                     {"flags", r.flags}});
  }
  log["multiplicity_sum"] = msum;
  log["zeros"] = items;
  write_file(out / "search_log.json", log.dump(2) + "\n");
  return 0;
}

int cmd_spectrum(const RunConfig& cfg, const fs::path& out, bool use_cache) {
  const Workspace ws = make_workspace(cfg);
  DetCache cache;
  if (use_cache) cache.open((out / "det_cache.jsonl").string());
  const DetFn det =
      make_cached_detfn(ws, Sheet::Physical, use_cache ? &cache : nullptr);
  const std::vector<Resonance> eig =
      find_discrete_spectrum_fn(det, -0.995, 0.995);
  if (use_cache) cache.flush();
  write_file(out / "spectrum.csv", resonance_csv(eig));
  return 0;
}

int cmd_oracle(const RunConfig& cfg, const fs::path& out) {
  const MatrixPotential V = make_potential(cfg);
  const int kmax = std::min(
      20, 6 + (int)std::ceil(std::max(std::abs(cfg.region.re_min),
                                      std::abs(cfg.region.re_max))));
  std::vector<Resonance> rows =
      radial_resonances(V, cfg.region, kmax, cfg.find);
  const std::vector<Resonance> eig =
      radial_discrete_spectrum(V, -0.995, 0.995, 14);
  rows.insert(rows.end(), eig.begin(), eig.end());
  write_file(out / "resonances.csv", resonance_csv(rows));
  return 0;
}

int cmd_scatter(const RunConfig& cfg, const fs::path& out) {
  const Workspace ws = make_workspace(cfg);
  std::vector<double> grid;
  const int per_side = 25;
  const double lo = 1.05, hi = std::max(cfg.trace_Lambda, 1.5);
  for (int i = 0; i < per_side; ++i) {
    const double u = lo + (hi - lo) * i / (per_side - 1);
    grid.push_back(u);
    grid.push_back(-u);
  }
  const std::vector<ShiftSample> samples =
      spectral_shift_curve(grid, ws.V, ws.chi, ws.quad, ws.sphere);
  write_file(out / "scattering.csv", scattering_csv(samples));
  return 0;
}

int cmd_trace_check(const RunConfig& cfg, const fs::path& out) {
  const MatrixPotential V = make_potential(cfg);
  const TestFunction phi = make_test_function(cfg.trace_t0, cfg.trace_w);

  // Shift curve over both cuts via the channel decomposition.
  const std::vector<double> grid = default_xi_grid(cfg.trace_Lambda_max);
  const XiCurve curve = radial_xi_curve(V, grid);

  // Zeros in the upper half of the continued determinant, reflected to the
  // resonance half-plane for the pairing.
  const double L = cfg.trace_Lambda;
  SearchRegion upper{-L - 1.0, L + 1.0, 1e-3, 2.6, Sheet::Second,
                     cfg.region.max_depth, cfg.region.boundary_samples};
  const int kmax = std::min(20, 6 + (int)std::ceil(L + 1.0));
  const std::vector<Resonance> zeros =
      radial_resonances(V, upper, kmax, cfg.find);
  std::vector<Resonance> res;
  for (Resonance z : zeros) {
    z.lambda = std::conj(z.lambda);
    res.push_back(z);
  }
  const std::vector<Resonance> eig = radial_discrete_spectrum(V, -0.995, 0.995, 14);

  const double gap = gap_correction(phi, V);
  const TraceReport rep =
      compare_trace(phi, curve, res, eig, cfg.trace_Lambda, 0.0, gap);
  write_file(out / "trace_report.json", trace_report_json(rep).dump(2) + "\n");
  return rep.pass ? 0 : 3;
}

int cmd_verify(const RunConfig& cfg, const fs::path& out) {
  std::vector<VerifyCheck> checks;
  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const DiracAlgebra& dm = dirac_matrices();

  {  // Clifford relations of the generators
    double resid = 0.0;
    const Mat4 gens[4] = {dm.alpha[0], dm.alpha[1], dm.alpha[2], dm.beta};
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j) {
        const Mat4 anti = gens[i] * gens[j] + gens[j] * gens[i];
        const Mat4 want = (i == j) ? Mat4(2.0 * Mat4::Identity()) : Mat4(Mat4::Zero());
        resid = std::max(resid, (anti - want).norm());
      }
    checks.push_back({"clifford_relations", resid, 1e-15, resid <= 1e-15});
  }
  {  // half-space projectors at random momenta
    double resid = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Vec3 xi(gauss(rng), gauss(rng), gauss(rng));
      const double e = std::sqrt(1.0 + xi.squaredNorm());
      const Mat4 pp = projector(xi, +1), pm = projector(xi, -1);
      resid = std::max(resid, (pp * pp - pp).norm());
      resid = std::max(resid, (pp + pm - Mat4::Identity()).norm());
      resid = std::max(resid, (symbol_d0(xi) * pp - e * pp).norm());
    }
    checks.push_back({"momentum_projectors", resid, 1e-12, resid <= 1e-12});
  }
  {  // diagonalizing conjugation of the free symbol
    double resid = 0.0;
    for (int t = 0; t < 100; ++t) {
      const Vec3 xi(gauss(rng), gauss(rng), gauss(rng));
      const double e = std::sqrt(1.0 + xi.squaredNorm());
      const Mat4 g = fw_transform(xi);
      resid = std::max(
          resid, (g * symbol_d0(xi) * g.inverse() - e * dm.beta).norm());
    }
    checks.push_back({"fw_conjugation", resid, 1e-10, resid <= 1e-10});
  }
  {  // closed-form kernel vs finite differences through the scalar kernel
    double resid = 0.0;
    for (int t = 0; t < 20; ++t) {
      const Vec3 x(gauss(rng), gauss(rng), gauss(rng));
      Vec3 y(gauss(rng), gauss(rng), gauss(rng));
      if ((x - y).norm() < 0.3) y += Vec3(0.5, 0.5, 0.5);
      const Complex lam(1.2 + 0.3 * gauss(rng), 0.8 + 0.1 * gauss(rng));
      const SpectralParameter sp = sheeted(lam, Sheet::Physical);
      const Mat4 closed = dirac_resolvent_kernel(sp, x, y);
      const double h = 1e-4;
      Mat4 fd = (sp.lambda * Mat4::Identity() + dm.beta) *
                helmholtz_kernel(sp, x, y);
      for (int a = 0; a < 3; ++a) {
        Vec3 xp = x, xm = x;
        xp[a] += h;
        xm[a] -= h;
        const Complex dg =
            (helmholtz_kernel(sp, xp, y) - helmholtz_kernel(sp, xm, y)) /
            (2.0 * h);
        fd += -iu * dg * dm.alpha[a];
      }
      resid = std::max(resid, (closed - fd).norm() / closed.norm());
    }
    checks.push_back({"kernel_oracle", resid, 1e-6, resid <= 1e-6});
  }
  {  // far-field diagonalization on the energy shell
    double resid = 0.0;
    const SpectralParameter sp = sheeted(Complex(1.5, 0.0), Sheet::Physical);
    for (int t = 0; t < 20; ++t) {
      Vec3 w(gauss(rng), gauss(rng), gauss(rng));
      w.normalize();
      resid = std::max(resid, fw_farfield_residual(sp, w));
    }
    checks.push_back({"farfield_diagonalization", resid, 1e-10, resid <= 1e-10});
  }

  const Workspace ws = make_workspace(cfg);
  {  // branch-jump factorization of the free resolvent
    const JumpResidual jr = sheet_jump_residual(Complex(1.5, 0.3), ws.chi,
                                                ws.quad, ws.sphere);
    checks.push_back(
        {"sheet_jump", jr.relative, 1e-6, jr.relative <= 1e-6});
  }
  {  // unitarity on the continuous spectrum
    const ScatteringSample s =
        scattering_matrix(1.5, ws.V, ws.chi, ws.quad, ws.sphere);
    checks.push_back({"unitarity", s.unitarity_residual, 1e-4,
                      s.unitarity_residual <= 1e-4});
  }
  {  // reciprocal determinant identity across conjugation
    const ScatteringSample s1 = scattering_matrix_at(
        sheeted(Complex(1.5, 0.2), Sheet::Physical), ws.V, ws.chi, ws.quad,
        ws.sphere, false);
    const ScatteringSample s2 = scattering_matrix_at(
        sheeted(Complex(1.5, -0.2), Sheet::Second), ws.V, ws.chi, ws.quad,
        ws.sphere, false);
    const double resid = std::abs(s1.s * std::conj(s2.s) - 1.0);
    checks.push_back({"reciprocity", resid, 1e-4, resid <= 1e-4});
  }

  const nlohmann::json rep = verify_report_json(checks);
  write_file(out / "verify_report.json", rep.dump(2) + "\n");
  bool all = true;
  for (const VerifyCheck& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
              << "  residual=" << c.residual << "  tol=" << c.tolerance
              << "\n";
    all = all && c.pass;
  }
  return all ? 0 : 3;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Resonance and scattering toolkit for perturbed 3D Dirac operators"};
  app.require_subcommand(1);

  std::string config_path, out_dir = "out";
  int threads = 0;
  bool no_cache = false;
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--out", out_dir, "output directory");
  app.add_option("--threads", threads, "BLAS threads (0 = library default)");
  app.add_flag("--no-cache", no_cache, "disable the determinant cache");

  auto* sub_res = app.add_subcommand("resonances", "second-sheet zero search");
  auto* sub_spec = app.add_subcommand("spectrum", "discrete spectrum in the gap");
  auto* sub_scat = app.add_subcommand("scatter", "scattering curve on the cuts");
  auto* sub_trace = app.add_subcommand("trace-check", "wave-trace identity check");
  auto* sub_oracle = app.add_subcommand("oracle", "radial channel search");
  auto* sub_verify = app.add_subcommand("verify", "identity suite");

  CLI11_PARSE(app, argc, argv);

  if (threads > 0) {
    const std::string n = std::to_string(threads);
    setenv("OPENBLAS_NUM_THREADS", n.c_str(), 1);
    setenv("OMP_NUM_THREADS", n.c_str(), 1);
  }

  try {
    RunConfig cfg;
    if (!config_path.empty()) {
      std::ifstream f(config_path);
      if (!f) {
        std::cerr << "error: cannot open config " << config_path << "\n";
        return 1;
      }
      std::stringstream ss;
      ss << f.rdbuf();
      cfg = load_config_text(ss.str());
    }
    const fs::path out(out_dir);
    fs::create_directories(out);
    write_file(out / "effective_config.json", config_to_json(cfg).dump(2) + "\n");

    if (sub_res->parsed()) return cmd_resonances(cfg, out, !no_cache);
    if (sub_spec->parsed()) return cmd_spectrum(cfg, out, !no_cache);
    if (sub_scat->parsed()) return cmd_scatter(cfg, out);
    if (sub_trace->parsed()) return cmd_trace_check(cfg, out);
    if (sub_oracle->parsed()) return cmd_oracle(cfg, out);
    if (sub_verify->parsed()) return cmd_verify(cfg, out);
    return 1;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
