#pragma once

#include <cstdio>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "nbeaver/engine.hpp"
#include "nbeaver/nonlinear.hpp"
#include "nbeaver/protocols.hpp"
#include "nbeaver/reference.hpp"

namespace nbeaver::bench {

struct BenchOptions {
  SessionConfig session;
  ApproxConfig approx;
  std::string method = "multi"; // naive | multi
  bool coalesce = true;
  bool with_timings = false; // wall-clock t_comp is nondeterministic, so it
                             // is only written to reports when asked for
};

struct OpStat {
  std::string op;
  u64 rounds = 0;
  u64 bytes = 0;
};

// One report row. Accuracy fields below use negative sentinels for
// "not applicable"; they are emitted as null/empty.
struct BenchRow {
  std::string scenario;
  std::string method;
  std::string profile;
  double latency_ms = 0.0;
  double bandwidth_gbps = 0.0;
  int parties = 0;
  int max_arity = 0;
  int fxp_bits = 0;
  u64 seed = 0;
  std::string coalesce; // "on" | "off" | ""
  std::string function;
  int arity = 0;
  int count = 0;
  int grid_points = 0;
  int degree = 0;
  u64 online_rounds = 0;
  u64 online_bytes = 0;
  u64 offline_bytes = 0;
  double sim_ms = 0.0;
  double t_comp_ms = 0.0;
  double max_err_oracle = -1.0;
  double mean_err_oracle = -1.0;
  double max_err_true = -1.0;
  int argmax_match = -1;
  int argmax_total = -1;
  std::vector<OpStat> breakdown;
};

struct BenchReport {
  std::vector<BenchRow> rows;
};

inline BenchRow make_row(const std::string& scenario,
                         const BenchOptions& opts) {
  BenchRow row;
  row.scenario = scenario;
  row.method = opts.method;
  row.profile = opts.session.net.name;
  row.latency_ms = opts.session.net.latency_ms;
  row.bandwidth_gbps = opts.session.net.bandwidth_bps / 1e9;
  row.parties = opts.session.n_parties;
  row.max_arity = opts.session.max_arity;
  row.fxp_bits = opts.session.codec.frac_bits;
  row.seed = opts.session.seed;
  row.coalesce = opts.coalesce ? "on" : "off";
  return row;
}

inline void fill_stats(BenchRow& row, const RoundStats& st) {
  row.online_rounds = st.online_rounds;
  row.online_bytes = st.online_bytes;
  row.offline_bytes = st.offline_bytes;
  row.sim_ms = st.simulated_ms;
}

// ---------------------------------------------------------------------------
// bench-mul: `count` sequential arity-ary products under the naive chain or
// the one-round multivariate protocol. Metrics are snapshotted before the
// final result reveal so the reported rounds are the products' own.
// ---------------------------------------------------------------------------
inline BenchReport bench_mul(int arity, int count, const BenchOptions& opts) {
  if (arity < 2 || arity > opts.session.max_arity)
    throw UsageError("bench-mul: arity outside [2, max_arity]");
  if (count < 1) throw UsageError("bench-mul: count must be >= 1");

  Rng64 gen(splitmix64(opts.session.seed ^ 0xbe7cf00dull));
  std::vector<std::vector<double>> groups(static_cast<std::size_t>(count));
  for (auto& g : groups) {
    g.resize(std::size_t(arity));
    for (auto& v : g) v = gen.uniform(-1.0, 1.0);
  }

  const bool naive = opts.method == "naive";
  RoundStats snap;
  std::vector<double> results(static_cast<std::size_t>(count));
  Session sess(opts.session);
  auto res = sess.run([&](PartyCtx& ctx) {
    std::vector<ShareVec> products;
    products.reserve(std::size_t(count));
    for (const auto& g : groups) {
      std::vector<ShareVec> xs;
      xs.reserve(std::size_t(arity));
      for (double v : g) xs.push_back(input_share(ctx, 0, {&v, 1}));
      products.push_back(naive ? product_naive(ctx, xs)
                               : product_multivariate(ctx, xs));
    }
    if (ctx.party() == 0 && ctx.metered()) snap = ctx.stats_snapshot();
    // one coalesced reveal of all results, outside the snapshot
    std::vector<RevealTicket> tickets;
    for (const auto& p : products) tickets.push_back(ctx.defer_reveal(p));
    ctx.flush();
    if (ctx.party() == 0 && ctx.metered())
      for (std::size_t i = 0; i < tickets.size(); ++i)
        results[i] = ctx.codec().decode(tickets[i].value()[0]);
  });
  snap.offline_bytes = res.stats.offline_bytes;

  BenchRow row = make_row("mul", opts);
  row.arity = arity;
  row.count = count;
  fill_stats(row, snap);
  if (opts.with_timings) row.t_comp_ms = res.t_comp_ms;

  const FixedCodec codec = opts.session.codec;
  double max_err = 0.0, sum_err = 0.0;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    double truth = 1.0;
    for (double v : groups[i]) truth *= codec.quantize(v);
    const double err = std::fabs(results[i] - truth);
    max_err = std::max(max_err, err);
    sum_err += err;
  }
  row.max_err_true = max_err;
  row.mean_err_oracle = sum_err / double(count);
  row.max_err_oracle = max_err;

  BenchReport rep;
  rep.rows.push_back(std::move(row));
  return rep;
}

// ---------------------------------------------------------------------------
// bench-nonlinear: sweep a function over a grid, batched into one vectorized
// schedule. Reports error against the recurrence oracle and the true
// function, plus the rounds of the sweep itself.
// ---------------------------------------------------------------------------
inline BenchReport bench_nonlinear(const std::string& fn, double lo, double hi,
                                   int points, const BenchOptions& opts) {
  if (points < 1) throw UsageError("bench-nonlinear: need at least one point");
  static const char* known[] = {"exp", "log", "reciprocal", "sin",
                                "cos", "sigmoid", "tanh", "softmax"};
  bool ok = false;
  for (const char* k : known) ok = ok || fn == k;
  if (!ok) throw UsageError("bench-nonlinear: unknown function " + fn);

  const ApproxConfig& acfg = opts.approx;
  const reference::NoiseModel noise{opts.session.codec.frac_bits,
                                    opts.session.n_parties, false};

  std::vector<double> grid(static_cast<std::size_t>(points));
  const std::size_t classes = 4; // softmax benches random 4-class rows
  if (fn == "softmax") {
    Rng64 gen(splitmix64(opts.session.seed ^ 0x50f7ull));
    grid.resize(std::size_t(points) * classes);
    for (auto& v : grid) v = gen.uniform(lo, hi);
  } else {
    for (int i = 0; i < points; ++i)
      grid[std::size_t(i)] =
          points == 1 ? lo : lo + (hi - lo) * double(i) / double(points - 1);
  }

  RoundStats snap;
  std::vector<double> out;
  Session sess(opts.session);
  auto res = sess.run([&](PartyCtx& ctx) {
    ShareVec x = input_share(ctx, 0, grid);
    ShareVec y;
    if (fn == "exp") y = nbeaver::exp(ctx, x, acfg);
    else if (fn == "log") y = nbeaver::log(ctx, x, acfg);
    else if (fn == "reciprocal") y = reciprocal(ctx, x, acfg);
    else if (fn == "sin") y = nbeaver::sin(ctx, x, acfg);
    else if (fn == "cos") y = nbeaver::cos(ctx, x, acfg);
    else if (fn == "sigmoid") y = sigmoid(ctx, x, acfg);
    else if (fn == "tanh") y = nbeaver::tanh(ctx, x, acfg);
    else y = softmax(ctx, x, classes, acfg);
    if (ctx.party() == 0 && ctx.metered()) snap = ctx.stats_snapshot();
    auto vals = reveal_decoded(ctx, y);
    if (ctx.party() == 0 && ctx.metered()) out = vals;
  });
  snap.offline_bytes = res.stats.offline_bytes;

  // Per-point oracle values, noise bounds, and ground truth.
  std::vector<double> oracle(out.size()), truth(out.size());
  if (fn == "softmax") {
    for (int r = 0; r < points; ++r) {
      std::span<const double> row(grid.data() + std::size_t(r) * classes,
                                  classes);
      auto orc = reference::softmax_rec(row, acfg, noise);
      double den = 0.0;
      for (double v : row) den += std::exp(v);
      for (std::size_t c = 0; c < classes; ++c) {
        oracle[std::size_t(r) * classes + c] = orc[c].v;
        truth[std::size_t(r) * classes + c] = std::exp(row[c]) / den;
      }
    }
  } else {
    for (std::size_t i = 0; i < out.size(); ++i) {
      const double x = grid[i];
      if (fn == "exp") {
        oracle[i] = reference::exp_rec(x, acfg, noise).v;
        truth[i] = std::exp(x);
      } else if (fn == "log") {
        oracle[i] = reference::log_rec(x, acfg, noise).v;
        truth[i] = std::log(x);
      } else if (fn == "reciprocal") {
        oracle[i] = reference::recip_rec(x, acfg, noise).v;
        truth[i] = 1.0 / x;
      } else if (fn == "sin") {
        oracle[i] = reference::sin_rec(x, acfg, noise).v;
        truth[i] = std::sin(x);
      } else if (fn == "cos") {
        oracle[i] = reference::cos_rec(x, acfg, noise).v;
        truth[i] = std::cos(x);
      } else if (fn == "sigmoid") {
        oracle[i] = reference::sigmoid_rec(x, acfg, noise).v;
        truth[i] = 1.0 / (1.0 + std::exp(-x));
      } else {
        oracle[i] = reference::tanh_rec(x, acfg, noise).v;
        truth[i] = std::tanh(x);
      }
    }
  }

  BenchRow row = make_row("nonlinear", opts);
  row.function = fn;
  row.grid_points = points;
  fill_stats(row, snap);
  if (opts.with_timings) row.t_comp_ms = res.t_comp_ms;
  double max_o = 0.0, sum_o = 0.0, max_t = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    max_o = std::max(max_o, std::fabs(out[i] - oracle[i]));
    sum_o += std::fabs(out[i] - oracle[i]);
    max_t = std::max(max_t, std::fabs(out[i] - truth[i]));
  }
  row.max_err_oracle = max_o;
  row.mean_err_oracle = sum_o / double(out.size());
  row.max_err_true = max_t;

  BenchReport rep;
  rep.rows.push_back(std::move(row));
  return rep;
}

// ---------------------------------------------------------------------------
// bench-mlp: secure inference with the bundled 2-layer MLP (8 -> 16 -> 3,
// sigmoid hidden, softmax output) over 100 seeded random inputs. With
// coalescing on, the whole batch flows through each stage together so
// independent per-input exchanges merge; with coalescing off, every input
// runs its own sequential forward pass.
// ---------------------------------------------------------------------------
struct MlpModel {
  static constexpr std::size_t kIn = 8, kHidden = 16, kOut = 3;
  std::vector<double> w1, b1, w2, b2; // row-major

  static MlpModel seeded(u64 seed) {
    MlpModel mdl;
    Rng64 gen(splitmix64(seed ^ 0x317a11ull));
    mdl.w1.resize(kIn * kHidden);
    mdl.b1.resize(kHidden);
    mdl.w2.resize(kHidden * kOut);
    mdl.b2.resize(kOut);
    for (auto& v : mdl.w1) v = gen.uniform(-0.8, 0.8);
    for (auto& v : mdl.b1) v = gen.uniform(-0.3, 0.3);
    for (auto& v : mdl.w2) v = gen.uniform(-0.75, 0.75);
    for (auto& v : mdl.b2) v = gen.uniform(-0.3, 0.3);
    return mdl;
  }

  // Plaintext forward pass with true sigmoid/softmax; returns class scores.
  std::vector<double> forward(std::span<const double> x) const {
    std::vector<double> h(kHidden, 0.0);
    for (std::size_t j = 0; j < kHidden; ++j) {
      double acc = b1[j];
      for (std::size_t i = 0; i < kIn; ++i) acc += x[i] * w1[i * kHidden + j];
      h[j] = 1.0 / (1.0 + std::exp(-acc));
    }
    std::vector<double> logits(kOut, 0.0);
    for (std::size_t c = 0; c < kOut; ++c) {
      double acc = b2[c];
      for (std::size_t j = 0; j < kHidden; ++j)
        acc += h[j] * w2[j * kOut + c];
      logits[c] = acc;
    }
    double den = 0.0;
    for (double l : logits) den += std::exp(l);
    for (auto& l : logits) l = std::exp(l) / den;
    return logits;
  }
};

inline std::size_t argmax(std::span<const double> v) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (v[i] > v[best]) best = i;
  return best;
}

inline BenchReport bench_mlp(const BenchOptions& opts, int n_inputs = 100) {
  const MlpModel mdl = MlpModel::seeded(opts.session.seed);
  Rng64 gen(splitmix64(opts.session.seed ^ 0x1235813ull));
  const std::size_t rows = std::size_t(n_inputs);
  std::vector<double> inputs(rows * MlpModel::kIn);
  for (auto& v : inputs) v = gen.uniform(-1.0, 1.0);

  std::vector<std::size_t> want(rows);
  for (std::size_t r = 0; r < rows; ++r)
    want[r] = argmax(mdl.forward(
        std::span<const double>(inputs.data() + r * MlpModel::kIn,
                                MlpModel::kIn)));

  const ApproxConfig& acfg = opts.approx;
  RoundStats snap;
  std::vector<OpStat> breakdown;
  std::vector<double> probs(rows * MlpModel::kOut);

  auto add_bias = [](PartyCtx& ctx, MatShare m, const ShareVec& bias) {
    for (std::size_t r = 0; r < m.rows; ++r)
      for (std::size_t c = 0; c < m.cols; ++c)
        m.flat.v[r * m.cols + c] =
            ring_add(m.flat.v[r * m.cols + c],
                     bias.v[c]);
    (void)ctx;
    return m;
  };

  auto forward_batch = [&](PartyCtx& ctx, const ShareVec& xflat,
                           std::size_t nrows, std::vector<OpStat>* bd) {
    auto mark = [&](const char* op, RoundStats& prev) {
      if (bd && ctx.party() == 0 && ctx.metered()) {
        RoundStats now = ctx.stats_snapshot();
        bd->push_back({op, now.online_rounds - prev.online_rounds,
                       now.online_bytes - prev.online_bytes});
        prev = now;
      }
    };
    RoundStats prev;
    if (bd && ctx.party() == 0 && ctx.metered()) prev = ctx.stats_snapshot();

    ShareVec w1 = input_share(ctx, 0, mdl.w1);
    ShareVec b1 = input_share(ctx, 0, mdl.b1);
    ShareVec w2 = input_share(ctx, 0, mdl.w2);
    ShareVec b2 = input_share(ctx, 0, mdl.b2);

    MatShare X{nrows, MlpModel::kIn, xflat};
    MatTripleShare t1 =
        ctx.take_matmul(nrows, MlpModel::kIn, MlpModel::kHidden);
    MatShare Z1 = matmul(ctx, X, MatShare{MlpModel::kIn, MlpModel::kHidden, w1},
                         t1);
    Z1 = add_bias(ctx, std::move(Z1), b1);
    mark("matmul1", prev);

    ShareVec H = sigmoid(ctx, Z1.flat, acfg);
    mark("sigmoid", prev);

    MatTripleShare t2 =
        ctx.take_matmul(nrows, MlpModel::kHidden, MlpModel::kOut);
    MatShare Z2 = matmul(ctx, MatShare{nrows, MlpModel::kHidden, H},
                         MatShare{MlpModel::kHidden, MlpModel::kOut, w2}, t2);
    Z2 = add_bias(ctx, std::move(Z2), b2);
    mark("matmul2", prev);

    ShareVec P = softmax(ctx, Z2.flat, MlpModel::kOut, acfg);
    mark("softmax", prev);
    return P;
  };

  Session sess(opts.session);
  auto res = sess.run([&](PartyCtx& ctx) {
    ShareVec out;
    if (opts.coalesce) {
      ShareVec x = input_share(ctx, 1, inputs);
      out = forward_batch(ctx, x, rows, &breakdown);
    } else {
      out = ShareVec{ctx.party(), 1, {}};
      for (std::size_t r = 0; r < rows; ++r) {
        std::span<const double> xr(inputs.data() + r * MlpModel::kIn,
                                   MlpModel::kIn);
        ShareVec x = input_share(ctx, 1, xr);
        ShareVec p = forward_batch(ctx, x, 1, nullptr);
        out.v.insert(out.v.end(), p.v.begin(), p.v.end());
      }
    }
    if (ctx.party() == 0 && ctx.metered()) snap = ctx.stats_snapshot();
    auto vals = reveal_decoded(ctx, out);
    if (ctx.party() == 0 && ctx.metered()) probs = vals;
  });
  snap.offline_bytes = res.stats.offline_bytes;

  int match = 0;
  for (std::size_t r = 0; r < rows; ++r) {
    std::span<const double> pr(probs.data() + r * MlpModel::kOut,
                               MlpModel::kOut);
    if (argmax(pr) == want[r]) ++match;
  }

  BenchRow row = make_row("mlp", opts);
  row.count = n_inputs;
  fill_stats(row, snap);
  if (opts.with_timings) row.t_comp_ms = res.t_comp_ms;
  row.argmax_match = match;
  row.argmax_total = n_inputs;
  row.breakdown = std::move(breakdown);

  BenchReport rep;
  rep.rows.push_back(std::move(row));
  return rep;
}

// ---------------------------------------------------------------------------
// Report emission. Field order is fixed; reruns with the same seed/config
// produce byte-identical files (wall-clock timings stay zero unless
// explicitly enabled).
// ---------------------------------------------------------------------------

inline std::string fmt_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.9g", v);
  return buf;
}

inline void emit_json(const BenchReport& rep, std::ostream& os) {
  nlohmann::ordered_json root = nlohmann::ordered_json::array();
  for (const auto& r : rep.rows) {
    nlohmann::ordered_json j;
    j["scenario"] = r.scenario;
    j["method"] = r.method;
    j["profile"] = r.profile;
    j["latency_ms"] = r.latency_ms;
    j["bandwidth_gbps"] = r.bandwidth_gbps;
    j["parties"] = r.parties;
    j["max_arity"] = r.max_arity;
    j["fxp_bits"] = r.fxp_bits;
    j["seed"] = r.seed;
    j["coalesce"] = r.coalesce;
    j["function"] = r.function;
    j["arity"] = r.arity;
    j["count"] = r.count;
    j["grid_points"] = r.grid_points;
    j["degree"] = r.degree;
    j["online_rounds"] = r.online_rounds;
    j["online_bytes"] = r.online_bytes;
    j["offline_bytes"] = r.offline_bytes;
    j["sim_ms"] = r.sim_ms;
    j["t_comp_ms"] = r.t_comp_ms;
    if (r.max_err_oracle >= 0) j["max_err_oracle"] = r.max_err_oracle;
    else j["max_err_oracle"] = nullptr;
    if (r.mean_err_oracle >= 0) j["mean_err_oracle"] = r.mean_err_oracle;
    else j["mean_err_oracle"] = nullptr;
    if (r.max_err_true >= 0) j["max_err_true"] = r.max_err_true;
    else j["max_err_true"] = nullptr;
    if (r.argmax_total >= 0) {
      j["argmax_match"] = r.argmax_match;
      j["argmax_total"] = r.argmax_total;
    } else {
      j["argmax_match"] = nullptr;
      j["argmax_total"] = nullptr;
    }
    nlohmann::ordered_json bd = nlohmann::ordered_json::array();
    for (const auto& op : r.breakdown) {
      nlohmann::ordered_json o;
      o["op"] = op.op;
      o["rounds"] = op.rounds;
      o["bytes"] = op.bytes;
      bd.push_back(o);
    }
    j["breakdown"] = bd;
    root.push_back(j);
  }
  os << root.dump(2) << "\n";
}

inline const char* csv_header() {
  return "scenario,method,profile,latency_ms,bandwidth_gbps,parties,"
         "max_arity,fxp_bits,seed,coalesce,function,arity,count,grid_points,"
         "degree,online_rounds,online_bytes,offline_bytes,sim_ms,t_comp_ms,"
         "max_err_oracle,mean_err_oracle,max_err_true,argmax_match,"
         "argmax_total";
}

inline void emit_csv(const BenchReport& rep, std::ostream& os) {
  os << csv_header() << "\n";
  for (const auto& r : rep.rows) {
    os << r.scenario << ',' << r.method << ',' << r.profile << ','
       << fmt_double(r.latency_ms) << ',' << fmt_double(r.bandwidth_gbps)
       << ',' << r.parties << ',' << r.max_arity << ',' << r.fxp_bits << ','
       << r.seed << ',' << r.coalesce << ',' << r.function << ',' << r.arity
       << ',' << r.count << ',' << r.grid_points << ',' << r.degree << ','
       << r.online_rounds << ',' << r.online_bytes << ',' << r.offline_bytes
       << ',' << fmt_double(r.sim_ms) << ',' << fmt_double(r.t_comp_ms) << ',';
    if (r.max_err_oracle >= 0) os << fmt_double(r.max_err_oracle);
    os << ',';
    if (r.mean_err_oracle >= 0) os << fmt_double(r.mean_err_oracle);
    os << ',';
    if (r.max_err_true >= 0) os << fmt_double(r.max_err_true);
    os << ',';
    if (r.argmax_match >= 0) os << r.argmax_match;
    os << ',';
    if (r.argmax_total >= 0) os << r.argmax_total;
    os << "\n";
  }
}

} // namespace nbeaver::bench
