#include "beamre/experiment.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "beamre/channel.hpp"
#include "beamre/de.hpp"
#include "beamre/oracle.hpp"
#include "beamre/powerctl.hpp"
#include "beamre/rng.hpp"
#include "beamre/thread_pool.hpp"

namespace beamre {

namespace {

constexpr double kLn2 = 0.6931471805599453;

// substream tags for derived seeds
constexpr std::uint64_t kChannelStream = 11;
constexpr std::uint64_t kPointStream = 1000;
constexpr std::uint64_t kStartStream = 2000;
constexpr std::uint64_t kSolveMcStream = 3000;
constexpr std::uint64_t kVerifyStream = 5000;

void write_text(const std::string& path, const std::string& content) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw std::runtime_error("cannot open " + path + " for writing");
  os << content;
}

std::string join_path(const std::string& dir, const std::string& name) {
  return (std::filesystem::path(dir) / name).string();
}

std::vector<double> sweep_points(const ExperimentConfig& cfg) {
  std::vector<double> pts;
  for (double v = cfg.sweep_start; v <= cfg.sweep_stop + 1e-9 * cfg.sweep_step;
       v += cfg.sweep_step)
    pts.push_back(v);
  return pts;
}

bool all_finite(const MetricsReport& m) {
  return std::isfinite(m.se) && std::isfinite(m.ee) && std::isfinite(m.re) &&
         std::isfinite(m.p_sum);
}

struct PointOutcome {
  MetricsReport de;
  double pt_used = 0.0;
  int mm_iters = 0;
  std::vector<double> re_trace;
  std::string status = "ok";
  std::string error;
};

PointOutcome solve_point(const ChannelStats& stats, SystemParams params,
                         const SolverConfig& solver) {
  PointOutcome out;
  try {
    const MmState mm = mm_solve(stats, params, solver);
    out.de = metrics(stats, mm.alloc, params, RateModel::kDeterministic, 0, 0);
    out.pt_used = mm.alloc.total();
    out.mm_iters = mm.ell;
    out.re_trace = mm.re_trace;
    if (!mm.converged) out.status = "maxiter";
    if (!all_finite(out.de)) out.status = "failed";
  } catch (const std::exception& e) {
    out.status = "failed";
    out.error = e.what();
  }
  return out;
}

PowerAllocation random_start(const SystemParams& params, std::uint64_t seed) {
  Rng rng(seed);
  PowerAllocation a = PowerAllocation::zeros(params);
  double sum = 0.0;
  for (int k = 0; k < params.K; ++k)
    for (int m = 0; m < params.M; ++m) {
      const double e = -std::log(rng.uniform_pos());
      a.lambda[k][m] = e;
      sum += e;
    }
  for (auto& lam : a.lambda) lam *= params.Pmax / sum;
  return a;
}

double seopt_beta(const SystemParams& params) {
  return 1e6 * budget_power(params) / params.W;
}

}  // namespace

std::string csv_num(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

int effective_threads(const ExperimentConfig& cfg) {
  if (const char* env = std::getenv("BEAMRE_THREADS")) {
    const int v = std::atoi(env);
    if (v >= 1) return v;
  }
  return cfg.threads;
}

ChannelStats experiment_channel(const ExperimentConfig& cfg) {
  ChannelStats stats;
  if (!cfg.channel.omega_file.empty())
    stats = load_omega_file(cfg.channel.omega_file);
  else
    stats = synth_coupling(cfg.params, cfg.channel.pathloss_db,
                           cfg.channel.support_fraction, cfg.channel.decay,
                           derive_seed(cfg.seed, kChannelStream),
                           cfg.channel.jitter);
  stats.validate(cfg.params);
  return stats;
}

std::vector<std::string> run_sweep(const ExperimentConfig& cfg) {
  cfg.validate();
  if (cfg.sweep == SweepKind::kNone)
    throw std::invalid_argument("run_sweep: config has no sweep");
  std::filesystem::create_directories(cfg.out_dir);

  const ChannelStats stats = experiment_channel(cfg);
  const int threads = effective_threads(cfg);

  std::ostringstream csv;
  std::ostringstream manifest;
  manifest << "# beamre run manifest\n" << render_config(cfg);
  manifest << "channel_source = "
           << (cfg.channel.omega_file.empty() ? "synthetic" : "file") << "\n";
  manifest << "threads_effective = " << threads << "\n";

  std::string csv_name;
  switch (cfg.sweep) {
    case SweepKind::kPmax: {
      csv_name = "pmax_sweep.csv";
      const auto pts = sweep_points(cfg);
      std::vector<PointOutcome> res(pts.size());
      parallel_for(static_cast<int>(pts.size()), threads, [&](int i) {
        SystemParams p = cfg.params;
        p.Pmax = dbm_to_watt(pts[i]);
        res[i] = solve_point(stats, p, cfg.solver);
      });
      csv << "pmax_dbm,re,se,ee,pt_used_w,mm_iters,status\n";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& r = res[i];
        csv << csv_num(pts[i]) << ',' << csv_num(r.de.re) << ','
            << csv_num(r.de.se) << ',' << csv_num(r.de.ee) << ','
            << csv_num(r.pt_used) << ',' << r.mm_iters << ',' << r.status
            << '\n';
        manifest << "point " << i << ": pmax_dbm=" << csv_num(pts[i])
                 << " status=" << r.status << " mm_iters=" << r.mm_iters
                 << (r.error.empty() ? "" : " error=" + r.error) << "\n";
      }
      break;
    }
    case SweepKind::kBeta: {
      csv_name = "beta_sweep.csv";
      const auto pts = sweep_points(cfg);
      std::vector<PointOutcome> res(pts.size());
      parallel_for(static_cast<int>(pts.size()), threads, [&](int i) {
        SystemParams p = cfg.params;
        p.beta = pts[i];
        res[i] = solve_point(stats, p, cfg.solver);
      });
      csv << "beta,re,se,ee,status\n";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& r = res[i];
        csv << csv_num(pts[i]) << ',' << csv_num(r.de.re) << ','
            << csv_num(r.de.se) << ',' << csv_num(r.de.ee) << ',' << r.status
            << '\n';
        manifest << "point " << i << ": beta=" << csv_num(pts[i])
                 << " status=" << r.status << " mm_iters=" << r.mm_iters
                 << (r.error.empty() ? "" : " error=" + r.error) << "\n";
      }
      break;
    }
    case SweepKind::kTradeoff: {
      csv_name = "tradeoff.csv";
      const auto pts = sweep_points(cfg);
      const char* methods[3] = {"REOpt", "EEOpt", "SEOpt"};
      std::vector<std::array<PointOutcome, 3>> res(pts.size());
      parallel_for(static_cast<int>(pts.size()), threads, [&](int i) {
        SystemParams p = cfg.params;
        p.Pmax = dbm_to_watt(pts[i]);
        for (int j = 0; j < 3; ++j) {
          SystemParams pj = p;
          if (j == 1) pj.beta = 0.0;
          if (j == 2) pj.beta = seopt_beta(p);
          res[i][j] = solve_point(stats, pj, cfg.solver);
        }
      });
      csv << "pmax_dbm,se,ee,method,status\n";
      for (std::size_t i = 0; i < pts.size(); ++i)
        for (int j = 0; j < 3; ++j) {
          const auto& r = res[i][j];
          csv << csv_num(pts[i]) << ',' << csv_num(r.de.se) << ','
              << csv_num(r.de.ee) << ',' << methods[j] << ',' << r.status
              << '\n';
          manifest << "point " << i << ": pmax_dbm=" << csv_num(pts[i])
                   << " method=" << methods[j] << " status=" << r.status
                   << (j == 2 ? " seopt_beta=" + csv_num(seopt_beta([&] {
                         SystemParams p = cfg.params;
                         p.Pmax = dbm_to_watt(pts[i]);
                         return p;
                       }()))
                              : "")
                   << (r.error.empty() ? "" : " error=" + r.error) << "\n";
        }
      break;
    }
    case SweepKind::kConvergence: {
      csv_name = "convergence.csv";
      const auto pts = sweep_points(cfg);
      std::vector<PointOutcome> res(pts.size());
      parallel_for(static_cast<int>(pts.size()), threads, [&](int i) {
        SystemParams p = cfg.params;
        p.Pmax = dbm_to_watt(pts[i]);
        res[i] = solve_point(stats, p, cfg.solver);
      });
      csv << "pmax_dbm,mm_iter,re\n";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t t = 0; t < res[i].re_trace.size(); ++t)
          csv << csv_num(pts[i]) << ',' << t << ','
              << csv_num(res[i].re_trace[t]) << '\n';
        manifest << "point " << i << ": pmax_dbm=" << csv_num(pts[i])
                 << " status=" << res[i].status
                 << " mm_iters=" << res[i].mm_iters << "\n";
      }
      break;
    }
    case SweepKind::kMultistart: {
      csv_name = "multistart.csv";
      const int n = cfg.multistart_count;
      std::vector<PointOutcome> res(n + 1);
      parallel_for(n + 1, threads, [&](int i) {
        PointOutcome out;
        try {
          const PowerAllocation init =
              i == 0 ? PowerAllocation::uniform(cfg.params, cfg.params.Pmax)
                     : random_start(cfg.params,
                                    derive_seed(cfg.seed, kStartStream + i));
          const MmState mm = mm_solve(stats, cfg.params, cfg.solver, init);
          out.de =
              metrics(stats, mm.alloc, cfg.params, RateModel::kDeterministic,
                      0, 0);
          out.mm_iters = mm.ell;
          if (!mm.converged) out.status = "maxiter";
          if (!all_finite(out.de)) out.status = "failed";
        } catch (const std::exception& e) {
          out.status = "failed";
          out.error = e.what();
        }
        res[i] = out;
      });
      const double re_default = res[0].de.re;
      csv << "start,re,re_default,gap_rel,status\n";
      for (int i = 0; i <= n; ++i) {
        const double gap =
            (res[i].de.re - re_default) / std::max(std::abs(re_default), 1e-12);
        csv << i << ',' << csv_num(res[i].de.re) << ',' << csv_num(re_default)
            << ',' << csv_num(gap) << ',' << res[i].status << '\n';
        manifest << "start " << i << ": status=" << res[i].status
                 << " mm_iters=" << res[i].mm_iters
                 << (res[i].error.empty() ? "" : " error=" + res[i].error)
                 << "\n";
      }
      break;
    }
    case SweepKind::kRateCompare: {
      csv_name = "rate_compare.csv";
      const auto pts = sweep_points(cfg);
      struct Row {
        std::vector<double> exact, approx;
        std::string status = "ok";
      };
      std::vector<Row> res(pts.size());
      parallel_for(static_cast<int>(pts.size()), threads, [&](int i) {
        SystemParams p = cfg.params;
        p.Pmax = dbm_to_watt(pts[i]);
        const PowerAllocation alloc =
            PowerAllocation::uniform(p, p.Pmax);
        const std::uint64_t s = derive_seed(cfg.seed, kPointStream + i);
        Row row;
        try {
          for (int k = 0; k < p.K; ++k) {
            row.exact.push_back(mc_rate_exact(stats, alloc, k, p.sigma2,
                                              cfg.solver.mc_samples, s));
            row.approx.push_back(mc_rate_approx(stats, alloc, k, p.sigma2,
                                                cfg.solver.mc_samples, s));
          }
        } catch (const std::exception&) {
          row.status = "failed";
        }
        res[i] = row;
      });
      csv << "pmax_dbm,user,rate_exact,rate_approx,n_samples\n";
      for (std::size_t i = 0; i < pts.size(); ++i) {
        for (std::size_t k = 0; k < res[i].exact.size(); ++k)
          csv << csv_num(pts[i]) << ',' << (k + 1) << ','
              << csv_num(res[i].exact[k]) << ',' << csv_num(res[i].approx[k])
              << ',' << cfg.solver.mc_samples << '\n';
        manifest << "point " << i << ": pmax_dbm=" << csv_num(pts[i])
                 << " status=" << res[i].status << "\n";
      }
      break;
    }
    case SweepKind::kNone:
      break;
  }

  const std::string csv_path = join_path(cfg.out_dir, csv_name);
  const std::string manifest_path = join_path(cfg.out_dir, "run_manifest.txt");
  write_text(csv_path, csv.str());
  write_text(manifest_path, manifest.str());
  return {csv_path, manifest_path};
}

SolveOutput solve_once(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  const ChannelStats stats = experiment_channel(cfg);

  SolveOutput out;
  std::string status = "ok";
  const MmState mm = mm_solve(stats, cfg.params, cfg.solver);
  out.alloc = mm.alloc;
  out.mm_iters = mm.ell;
  out.converged = mm.converged;
  out.de = metrics(stats, mm.alloc, cfg.params, RateModel::kDeterministic, 0, 0);
  out.mc = metrics(stats, mm.alloc, cfg.params, RateModel::kApprox,
                   cfg.solver.mc_samples, derive_seed(cfg.seed, kSolveMcStream));
  if (!mm.converged) status = "maxiter";
  if (!all_finite(out.de) || !all_finite(out.mc)) status = "failed";

  std::ostringstream alloc_txt;
  for (int k = 0; k < cfg.params.K; ++k) {
    for (int m = 0; m < cfg.params.M; ++m)
      alloc_txt << (m ? " " : "") << csv_num(out.alloc.lambda[k][m]);
    alloc_txt << '\n';
  }
  std::ostringstream metrics_csv;
  metrics_csv << "se_de,ee_de,re_de,se_mc,ee_mc,re_mc,pt_used_w,mm_iters,"
                 "status\n";
  metrics_csv << csv_num(out.de.se) << ',' << csv_num(out.de.ee) << ','
              << csv_num(out.de.re) << ',' << csv_num(out.mc.se) << ','
              << csv_num(out.mc.ee) << ',' << csv_num(out.mc.re) << ','
              << csv_num(out.alloc.total()) << ',' << out.mm_iters << ','
              << status << '\n';

  out.alloc_path = join_path(cfg.out_dir, "allocation.txt");
  out.metrics_path = join_path(cfg.out_dir, "metrics.csv");
  write_text(out.alloc_path, alloc_txt.str());
  write_text(out.metrics_path, metrics_csv.str());
  return out;
}

std::vector<VerifyRow> verify(const ExperimentConfig& cfg) {
  cfg.validate();
  std::filesystem::create_directories(cfg.out_dir);
  const ChannelStats stats = experiment_channel(cfg);
  const SystemParams& params = cfg.params;
  const SolverConfig& solver = cfg.solver;

  std::vector<VerifyRow> rows;
  const auto add = [&rows](const std::string& check, double value,
                           double bound) {
    rows.push_back({check, value, bound, value <= bound ? "pass" : "fail"});
  };

  // surrogate at the uniform full-power anchor
  const PowerAllocation anchor = PowerAllocation::uniform(params, params.Pmax);
  const auto states = de_states_all(stats, anchor, params, solver);
  const Surrogate sur = make_surrogate(stats, anchor, params, states);

  {  // nu derivative vs central difference, 10 random beams/points
    Rng rng(derive_seed(cfg.seed, kVerifyStream));
    double worst = 0.0;
    for (int t = 0; t < 10; ++t) {
      const int k = static_cast<int>(rng.uniform_int(0, params.K - 1));
      const int m = static_cast<int>(rng.uniform_int(0, params.M - 1));
      const double x0 = rng.uniform() * params.Pmax / (params.K * params.M);
      const double analytic =
          marginal_utility_deriv(stats, sur, anchor, k, m, x0);
      const auto f = [&](double x) {
        return marginal_utility(stats, sur, anchor, k, m, x, 0.0);
      };
      worst = std::max(worst, fd_gap(f, analytic, x0, 1e-6 * std::max(x0, 1.0)));
    }
    add("fd_nu", worst, 1e-6);
  }

  {  // RE derivative vs central difference across waterfill
    double worst = 0.0;
    for (int t = 1; t <= 3; ++t) {
      const double pt = params.Pmax * t / 4.0;
      const WaterfillResult wf = waterfill(stats, sur, pt, solver);
      const double analytic =
          re_power_derivative(pt, wf.se_nats, wf.mu_star, params);
      const auto f = [&](double p) {
        const WaterfillResult w = waterfill(stats, sur, p, solver);
        const double den = params.xi * p + params.M * params.Pc + params.Ps;
        return (1.0 / den + params.beta / budget_power(params)) * w.se_nats;
      };
      worst = std::max(worst, fd_gap(f, analytic, pt, 1e-4 * params.Pmax));
    }
    add("fd_re_derivative", worst, 1e-3);
  }

  {  // water-filling KKT at Pmax/2
    const WaterfillResult wf = waterfill(stats, sur, params.Pmax / 2, solver);
    add("waterfill_kkt_residual", wf.kkt_residual, 1e-6);
    add("waterfill_slackness",
        std::abs(wf.mu_star * (wf.alloc.total() - params.Pmax / 2)), 1e-8);
  }

  if (params.K * params.M <= 256) {  // dual-solver cross-check
    double worst = 0.0;
    for (int t = 1; t <= 3; ++t) {
      const double pt = params.Pmax * t / 4.0;
      const WaterfillResult wf = waterfill(stats, sur, pt, solver);
      const auto [ref_alloc, ref_obj] =
          projected_gradient_inner(stats, sur, pt);
      worst = std::max(worst, std::abs(wf.se_nats - ref_obj) /
                                  std::max(std::abs(ref_obj), 1e-12));
    }
    add("waterfill_vs_refsolver", worst, 1e-5);
  } else {
    rows.push_back({"waterfill_vs_refsolver", 0.0, 1e-5, "skipped"});
  }

  if (params.K * params.M <= 6) {  // brute-force global reference
    const auto [galloc, gre] = grid_search_re(stats, params, solver, 25);
    const MmState mm = mm_solve(stats, params, solver);
    const double mm_re = mm.re_trace.back();
    const double shortfall =
        std::max(0.0, (gre - mm_re) / std::max(std::abs(gre), 1e-12));
    add("grid_check", shortfall, 1e-3);
  } else {
    rows.push_back({"grid_check", 0.0, 1e-3, "skipped"});
  }

  {  // DE rate vs Monte-Carlo
    const OracleReport rep =
        de_vs_mc_report(stats, anchor, params, std::max(solver.mc_samples, 100),
                        derive_seed(cfg.seed, kVerifyStream + 1));
    add("de_vs_mc", rep.gap, 0.02);
  }

  std::ostringstream csv;
  csv << "check,value,bound,status\n";
  for (const auto& r : rows)
    csv << r.check << ',' << csv_num(r.value) << ',' << csv_num(r.bound)
        << ',' << r.status << '\n';
  write_text(join_path(cfg.out_dir, "verify.csv"), csv.str());
  return rows;
}

}  // namespace beamre
