#include "cptv/harness/cli.hpp"

#include "cptv/errors.hpp"
#include "cptv/harness/artifacts.hpp"
#include "cptv/harness/svg.hpp"
#include "cptv/harness/trainer.hpp"
#include "cptv/io/csv.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>

namespace cptv::harness {

namespace {

using nlohmann::json;

std::filesystem::path resolve(const std::filesystem::path& p, const std::filesystem::path& config) {
  if (p.is_absolute() || config.empty()) return p;
  return config.parent_path() / p;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(path.string() + ": cannot open");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": malformed JSON: " + e.what());
  }
}

// Training data and, for advection-diffusion, the grid reference it came from.
struct Dataset {
  std::vector<pinn::TrainingBatch> batches;
  std::optional<ref::ReferenceSolution> reference;
};

Dataset load_dataset(const TrainConfig& c, const std::filesystem::path& config_path, std::ostream& out) {
  Dataset d;
  if (c.problem.variant == pinn::PdeVariant::NavierStokes2D) {
    const auto path = resolve(c.problem.data_path, config_path);
    d.batches = ref::partition_points(ref::read_flow_csv(path), c.grid.x_lo, c.grid.x_hi, c.online.batches);
    return d;
  }
  if (c.problem.data_path.empty()) {
    out << "solving reference on " << c.grid.nx << " x " << c.grid.nt + 1 << " grid\n";
    d.reference = ref::solve_advection_diffusion(c.grid);
  } else {
    d.reference = ref::read_solution_csv(resolve(c.problem.data_path, config_path));
    d.reference->lambda = c.grid.lambda;
  }
  d.batches = ref::sample_training_data(*d.reference, c.problem.samples, c.online.batches, c.seed);
  return d;
}

void print_metrics(const Metrics& m, std::ostream& out) {
  out << "solution_mse " << m.solution_mse << '\n';
  if (m.refit_mse) out << "refit_mse " << *m.refit_mse << '\n';
  for (std::size_t i = 0; i < m.segment_lambda_error.size(); ++i)
    out << "segment " << i << " lambda_error " << m.segment_lambda_error[i] << '\n';
  for (std::size_t i = 0; i < m.changepoint_error.size(); ++i)
    out << "changepoint " << i << " time_error " << m.changepoint_error[i] << '\n';
}

int cmd_generate(const std::string& config, const std::string& output, std::ostream& out) {
  ref::GridSpec grid;
  if (!config.empty()) grid = grid_from_json(read_json_file(config));
  const ref::ReferenceSolution sol = ref::solve_advection_diffusion(grid);
  ref::write_solution_csv(sol, output);
  out << "wrote " << output << " (" << sol.t.size() << " x " << sol.x.size() << " nodes)\n";
  return kOk;
}

int cmd_train(const std::string& config_path, const std::string& out_dir, std::ostream& out, std::ostream& err) {
  const TrainConfig c = load_config(config_path);
  for (const auto& w : c.validate()) err << "warning: " << w << '\n';
  const Dataset data = load_dataset(c, config_path, out);
  RunReport report;
  try {
    // Warnings were already printed above.
    report = train(c, data.batches, [&](const std::string& line) {
      if (line.rfind("warning: ", 0) != 0) out << line << '\n';
    });
  } catch (const DivergenceError& e) {
    std::filesystem::create_directories(out_dir);
    write_model({e.last_good(), {}, {}}, std::filesystem::path(out_dir) / "last_good_model.json");
    err << "error: training diverged: " << e.what() << "\nlast good model written to "
        << (std::filesystem::path(out_dir) / "last_good_model.json").string() << '\n';
    return kNumericalFailure;
  }
  if (data.reference) report.metrics = evaluate(report, *data.reference);
  write_run_artifacts(report, out_dir, data.reference ? &*data.reference : nullptr);
  out << "changepoints:";
  for (const auto& cp : report.changepoints) out << ' ' << cp.time;
  out << "\nregret " << report.regret << " bound " << report.regret_bound << '\n';
  if (report.metrics) print_metrics(*report.metrics, out);
  out << "artifacts in " << out_dir << '\n';
  return kOk;
}

int cmd_evaluate(const std::string& model_path, const std::string& reference_path, const std::string& config_path,
                 const std::string& output, std::ostream& out) {
  const ModelFile m = read_model(model_path);
  ref::ReferenceSolution reference = ref::read_solution_csv(reference_path);
  if (!config_path.empty()) reference.lambda = load_config(config_path).grid.lambda;
  RunReport r;
  r.model = m.model;
  r.changepoints = m.changepoints;
  r.refits = m.refits;
  const Metrics metrics = evaluate(r, reference);
  print_metrics(metrics, out);
  if (!output.empty()) {
    std::ofstream f(output);
    if (!f) throw ConfigError("cannot write " + output);
    f << metrics_to_json(metrics).dump(2) << '\n';
  }
  return kOk;
}

int cmd_regret_check(const std::string& weights_path, double eta, std::ostream& out) {
  const oco::RegretRecord record = oco::read_record_csv(weights_path, eta);
  const auto b = static_cast<long long>(record.size());
  const double g = record.max_l1();
  const double r = oco::regret(record);
  out << std::setprecision(10);
  out << "updates B = " << b << ", G = " << g << ", eta = " << eta << '\n';
  bool ok = true;
  if (!(g > 0.0)) {
    out << "all recorded losses are zero; regret " << r << '\n';
    ok = r <= 0.0;
  } else {
    const double bound = oco::regret_bound(eta, b, g);
    const bool pass = r <= bound;
    out << "regret " << r << " <= log(3)/eta + eta*B*G^2 = " << bound << " : " << (pass ? "PASS" : "FAIL") << '\n';
    ok = ok && pass;

    // Same loss stream, weights recomputed at the rate that minimizes the bound.
    const double eta_star = oco::optimal_eta(b, g);
    oco::RegretRecord replay;
    for (const auto& l : record.losses) replay.push(l, oco::update_weights(l, eta_star));
    const double r_star = oco::regret(replay);
    const double bound_star = 2.0 * g * std::sqrt(static_cast<double>(b) * std::log(3.0));
    const bool pass_star = r_star <= bound_star;
    out << "eta* = " << eta_star << ": regret " << r_star << " <= 2*G*sqrt(B*log(3)) = " << bound_star << " : "
        << (pass_star ? "PASS" : "FAIL") << '\n';
    ok = ok && pass_star;
  }
  out << (ok ? "regret-check PASS" : "regret-check FAIL") << '\n';
  return ok ? kOk : kNumericalFailure;
}

std::vector<double> column(const io::CsvTable& t, std::size_t c) {
  std::vector<double> v;
  for (const auto& r : t.rows) v.push_back(r[c]);
  return v;
}

int cmd_report(const std::string& run_dir, const std::string& out_dir_arg, std::ostream& out) {
  const std::filesystem::path dir(run_dir);
  const std::filesystem::path out_dir = out_dir_arg.empty() ? dir : std::filesystem::path(out_dir_arg);
  std::filesystem::create_directories(out_dir);
  const json rep = read_json_file(dir / "report.json");

  {
    const auto track = read_track_csv(dir / "lambda_track.csv");
    Series est{"estimated", {}, {}, true};
    for (const auto& s : track) {
      est.x.push_back(s.start);
      est.y.push_back(s.value);
    }
    std::vector<Series> lines{est};
    if (rep.contains("refits") && !rep["refits"].empty()) {
      Series refit{"refit", {}, {}, true};
      for (const auto& s : rep["refits"])
        if (!s["lambda"].is_null()) {
          refit.x.push_back(s["start"].get<double>());
          refit.y.push_back(s["lambda"].get<double>());
        }
      if (!refit.x.empty()) lines.push_back(refit);
    }
    if (rep.contains("config")) {
      const ref::GridSpec g = grid_from_json(rep["config"]["grid"]);
      if (rep["config"]["problem"]["variant"] == "advection_diffusion_1d") {
        Series truth{"generating", {}, {}, true};
        for (const auto& s : g.lambda) {
          truth.x.push_back(s.start);
          truth.y.push_back(s.value);
        }
        lines.push_back(truth);
      }
    }
    write_text(line_chart_svg(lines, {"lambda(t)", "t", "lambda"}), out_dir / "lambda.svg");
  }
  {
    const io::CsvTable w = io::read_csv(dir / "weights.csv", {"batch", "L_f", "L_s", "V_lambda", "w1", "w2", "w3", "gamma"});
    const auto k = column(w, 0);
    write_text(line_chart_svg({{"w1 fitting", k, column(w, 4)}, {"w2 structure", k, column(w, 5)},
                               {"w3 variation", k, column(w, 6)}},
                              {"loss weights", "weight update", "weight"}),
               out_dir / "weights.svg");
    ChartOptions o{"loss terms per batch", "weight update", "loss", true};
    write_text(line_chart_svg({{"L_f", k, column(w, 1)}, {"L_s", k, column(w, 2)}, {"V_lambda", k, column(w, 3)}}, o),
               out_dir / "batch_losses.svg");
  }
  {
    const io::CsvTable c = io::read_csv(dir / "loss_curve.csv", {"visit", "step", "loss"});
    std::map<int, Series> by_visit;
    double offset = 0.0;
    int current = -1;
    double last_step = 0.0;
    Series all{"weighted loss", {}, {}};
    for (const auto& r : c.rows) {
      const int visit = static_cast<int>(r[0]);
      if (visit != current) {
        if (current >= 0) offset += last_step + 1.0;
        current = visit;
      }
      last_step = r[1];
      all.x.push_back(offset + r[1]);
      all.y.push_back(r[2]);
    }
    write_text(line_chart_svg({all}, {"inner objective", "optimizer step", "loss", true}), out_dir / "loss_curve.svg");
  }
  const auto mse_path = dir / "mse_grid.csv";
  if (std::filesystem::exists(mse_path)) {
    const io::CsvTable m = io::read_csv(mse_path, {"t", "x", "sq_error"});
    if (m.rows.empty()) throw ConfigError(mse_path.string() + ": no rows");
    std::size_t nx = 0;
    while (nx < m.rows.size() && m.rows[nx][0] == m.rows[0][0]) ++nx;
    if (m.rows.size() % nx != 0) throw ConfigError(mse_path.string() + ": rows do not form a grid");
    const std::size_t nt = m.rows.size() / nx;
    Matrix field(static_cast<Eigen::Index>(nt), static_cast<Eigen::Index>(nx));
    for (std::size_t i = 0; i < m.rows.size(); ++i)
      field(static_cast<Eigen::Index>(i / nx), static_cast<Eigen::Index>(i % nx)) = m.rows[i][2];
    write_text(heatmap_svg(field, m.rows.front()[1], m.rows[nx - 1][1], m.rows.front()[0], m.rows.back()[0],
                           {"|u_NN - u|^2", "x", "t"}, true),
               out_dir / "mse_grid.svg");
  }
  out << "SVG files in " << out_dir.string() << '\n';
  return kOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Changepoint-aware physics-informed inverse solver", args.empty() ? "cptv" : args.front()};
  app.require_subcommand(1);

  std::string gen_config, gen_out = "reference.csv";
  auto* gen = app.add_subcommand("generate", "Solve the advection-diffusion reference and write t,x,u CSV");
  gen->add_option("-c,--config", gen_config, "JSON with a grid section (or a bare grid object)");
  gen->add_option("-o,--out", gen_out, "Output CSV");

  std::string train_config, train_out = "run";
  auto* tr = app.add_subcommand("train", "Train on a configuration and write run artifacts");
  tr->add_option("-c,--config", train_config, "Training configuration (JSON)")->required();
  tr->add_option("-o,--out", train_out, "Output directory");

  std::string ev_model, ev_ref, ev_config, ev_out;
  auto* ev = app.add_subcommand("evaluate", "Grid metrics of a trained model against a reference CSV");
  ev->add_option("-m,--model", ev_model, "model.json from a run")->required();
  ev->add_option("-r,--reference", ev_ref, "Reference t,x,u CSV")->required();
  ev->add_option("-c,--config", ev_config, "Configuration holding the generating lambda segments");
  ev->add_option("-o,--out", ev_out, "Write metrics JSON here");

  std::string rc_weights;
  double rc_eta = 1e-4;
  auto* rc = app.add_subcommand("regret-check", "Check realized regret of a weights.csv against the bound");
  rc->add_option("-w,--weights", rc_weights, "weights.csv (batch,L_f,L_s,V_lambda,w1,w2,w3,gamma)")->required();
  rc->add_option("--eta", rc_eta, "Learning rate the weights were produced with");

  std::string rp_run, rp_out;
  auto* rp = app.add_subcommand("report", "Render SVG charts from a run directory");
  rp->add_option("-r,--run", rp_run, "Run directory written by train")->required();
  rp->add_option("-o,--out", rp_out, "Output directory (default: the run directory)");

  std::vector<std::string> rest(args.size() > 1 ? args.begin() + 1 : args.end(), args.end());
  std::reverse(rest.begin(), rest.end());
  try {
    app.parse(rest);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kConfigError;
  }

  try {
    if (gen->parsed()) return cmd_generate(gen_config, gen_out, out);
    if (tr->parsed()) return cmd_train(train_config, train_out, out, err);
    if (ev->parsed()) return cmd_evaluate(ev_model, ev_ref, ev_config, ev_out, out);
    if (rc->parsed()) return cmd_regret_check(rc_weights, rc_eta, out);
    if (rp->parsed()) return cmd_report(rp_run, rp_out, out);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    err << "domain error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalFailure;
  } catch (const json::exception& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const std::filesystem::filesystem_error& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  err << app.help();
  return kConfigError;
}

}  // namespace cptv::harness
