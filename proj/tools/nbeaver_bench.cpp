// Benchmark harness: micro-benchmarks for the multiplication protocols and
// nonlinear approximations, plus a small secure-inference demo, all under the
// simulated network profiles. Reports are deterministic for a fixed seed and
// config.

#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "nbeaver/bench.hpp"

namespace {

struct CommonArgs {
  int parties = 3;
  std::string net = "n_low";
  double latency_ms = 0.1;
  double bandwidth_gbps = 1.0;
  int max_arity = 4;
  int fxp_bits = 16;
  std::uint64_t seed = 1;
  std::string method = "multi";
  std::string coalesce = "on";
  std::string out;
  std::string format = "json";
  bool with_timings = false;
  // approximation schedule
  int exp_base = 3;
  int exp_iters = 8;
  int inner_exp_iters = 6;
  int log_order = 8;
  int log_iters = 2;
  int recip_iters = 10;
  int trig_iters = 10;
};

void add_common_flags(CLI::App* cmd, CommonArgs& a) {
  cmd->add_option("--parties", a.parties, "number of computation parties")
      ->capture_default_str();
  cmd->add_option("--net", a.net, "network profile: n_low|n_med|n_high|custom")
      ->capture_default_str();
  cmd->add_option("--latency-ms", a.latency_ms,
                  "one-way latency for --net custom")
      ->capture_default_str();
  cmd->add_option("--bandwidth-gbps", a.bandwidth_gbps,
                  "bandwidth for --net custom")
      ->capture_default_str();
  cmd->add_option("--max-arity", a.max_arity,
                  "largest multivariate multiplication arity")
      ->capture_default_str();
  cmd->add_option("--fxp-bits", a.fxp_bits, "fixed-point fractional bits")
      ->capture_default_str();
  cmd->add_option("--seed", a.seed, "master seed")->capture_default_str();
  cmd->add_option("--method", a.method, "naive|multi")->capture_default_str();
  cmd->add_option("--coalesce", a.coalesce, "on|off")->capture_default_str();
  cmd->add_option("--out", a.out, "output path (stdout when omitted)");
  cmd->add_option("--format", a.format, "json|csv")->capture_default_str();
  cmd->add_flag("--with-timings", a.with_timings,
                "include wall-clock t_comp in the report (nondeterministic)");
  cmd->add_option("--exp-base", a.exp_base, "exponentiation base d")
      ->capture_default_str();
  cmd->add_option("--exp-iters", a.exp_iters, "exp iterations")
      ->capture_default_str();
  cmd->add_option("--inner-exp-iters", a.inner_exp_iters,
                  "iterations for exponentials nested in compositions")
      ->capture_default_str();
  cmd->add_option("--log-order", a.log_order, "log series order k")
      ->capture_default_str();
  cmd->add_option("--log-iters", a.log_iters, "log outer iterations")
      ->capture_default_str();
  cmd->add_option("--recip-iters", a.recip_iters, "reciprocal iterations")
      ->capture_default_str();
  cmd->add_option("--trig-iters", a.trig_iters, "sin/cos iterations")
      ->capture_default_str();
}

nbeaver::bench::BenchOptions to_options(const CommonArgs& a) {
  nbeaver::bench::BenchOptions opts;
  opts.session.n_parties = a.parties;
  opts.session.max_arity = a.max_arity;
  opts.session.codec.frac_bits = a.fxp_bits;
  opts.session.seed = a.seed;
  opts.session.net = a.net == "custom"
                         ? nbeaver::net_custom(a.latency_ms, a.bandwidth_gbps)
                         : nbeaver::net_by_name(a.net);
  if (a.fxp_bits < 8 || a.fxp_bits > 32)
    throw nbeaver::ConfigError("--fxp-bits must be in [8, 32]");
  if (a.method != "naive" && a.method != "multi")
    throw nbeaver::UsageError("--method must be naive or multi");
  if (a.coalesce != "on" && a.coalesce != "off")
    throw nbeaver::UsageError("--coalesce must be on or off");
  if (a.format != "json" && a.format != "csv")
    throw nbeaver::UsageError("--format must be json or csv");
  opts.method = a.method;
  opts.coalesce = a.coalesce == "on";
  opts.with_timings = a.with_timings;
  opts.approx = nbeaver::ApproxConfig{a.exp_base,  a.exp_iters, a.inner_exp_iters,
                                      a.log_order, a.log_iters, a.recip_iters,
                                      a.trig_iters};
  opts.approx.validate();
  return opts;
}

void write_report(const nbeaver::bench::BenchReport& rep, const CommonArgs& a) {
  std::ostringstream body;
  if (a.format == "csv")
    nbeaver::bench::emit_csv(rep, body);
  else
    nbeaver::bench::emit_json(rep, body);
  if (a.out.empty()) {
    std::cout << body.str();
    return;
  }
  std::ofstream f(a.out, std::ios::binary);
  if (!f) throw std::runtime_error("cannot open output path: " + a.out);
  f << body.str();
  if (!f) throw std::runtime_error("failed writing output path: " + a.out);
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"low-latency MPC benchmark harness"};
  app.set_config("--config", "",
                 "flat key = value file mirroring every flag; command-line "
                 "flags override it");
  app.fallthrough();
  app.require_subcommand(1);

  CommonArgs args;

  auto* mul = app.add_subcommand(
      "bench-mul", "n-ary products: naive chain vs multivariate");
  int arity = 4, count = 100;
  mul->add_option("--arity", arity, "product arity")->capture_default_str();
  mul->add_option("--count", count, "number of sequential products")
      ->capture_default_str();
  add_common_flags(mul, args);

  auto* nl = app.add_subcommand("bench-nonlinear",
                                "nonlinear approximation sweep");
  std::string function = "exp";
  double grid_lo = -2.0, grid_hi = 2.0;
  int grid_points = 101;
  nl->add_option("--function", function,
                 "exp|log|reciprocal|sin|cos|sigmoid|tanh|softmax")
      ->capture_default_str();
  nl->add_option("--grid-lo", grid_lo, "grid start")->capture_default_str();
  nl->add_option("--grid-hi", grid_hi, "grid end")->capture_default_str();
  nl->add_option("--grid-points", grid_points, "grid size")
      ->capture_default_str();
  add_common_flags(nl, args);

  auto* mlp = app.add_subcommand("bench-mlp",
                                 "secure inference demo on the bundled MLP");
  int inputs = 100;
  mlp->add_option("--inputs", inputs, "number of inference inputs")
      ->capture_default_str();
  add_common_flags(mlp, args);

  CLI11_PARSE(app, argc, argv);

  try {
    const auto opts = to_options(args);
    nbeaver::bench::BenchReport rep;
    if (mul->parsed())
      rep = nbeaver::bench::bench_mul(arity, count, opts);
    else if (nl->parsed())
      rep = nbeaver::bench::bench_nonlinear(function, grid_lo, grid_hi,
                                            grid_points, opts);
    else
      rep = nbeaver::bench::bench_mlp(opts, inputs);
    write_report(rep, args);
    if (args.with_timings && !rep.rows.empty())
      std::cerr << "t_comp_ms=" << rep.rows[0].t_comp_ms << "\n";
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
