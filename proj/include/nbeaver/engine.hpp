#pragma once

#include <chrono>
#include <condition_variable>
#include <functional>
#include <memory>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "nbeaver/dealer.hpp"
#include "nbeaver/ring.hpp"
#include "nbeaver/shares.hpp"
#include "nbeaver/wire.hpp"

namespace nbeaver {

// Network profile for the discrete-event clock: fixed one-way latency plus
// serialization time at the given bandwidth.
struct NetProfile {
  std::string name = "n_low";
  double latency_ms = 0.1;
  double bandwidth_bps = 1e9;
};

inline NetProfile net_low() { return {"n_low", 0.1, 1e9}; }
inline NetProfile net_med() { return {"n_med", 5.0, 1e9}; }
inline NetProfile net_high() { return {"n_high", 40.0, 1e9}; }

inline NetProfile net_custom(double latency_ms, double bandwidth_gbps) {
  if (latency_ms < 0 || bandwidth_gbps <= 0)
    throw ConfigError("net_custom: latency must be >= 0, bandwidth > 0");
  return {"custom", latency_ms, bandwidth_gbps * 1e9};
}

inline NetProfile net_by_name(const std::string& name) {
  if (name == "n_low") return net_low();
  if (name == "n_med") return net_med();
  if (name == "n_high") return net_high();
  throw UsageError("unknown net profile: " + name);
}

// Per-session counters. online_bytes accumulates the per-round payload,
// defined as the maximum over parties of payload bytes that party sends in
// the round (frame headers are not counted, so coalescing never changes the
// byte totals). offline_bytes counts correlated ring elements per party.
struct RoundStats {
  u64 online_rounds = 0;
  u64 online_bytes = 0;
  u64 offline_bytes = 0;
  double simulated_ms = 0.0;
  u64 dealer_online_msgs = 0;
};

// simulated time += latency + transfer time of the round payload.
inline double advance_clock(RoundStats& st, u64 round_bytes,
                            const NetProfile& net) {
  const double inc =
      net.latency_ms + double(round_bytes) * 8.0 / net.bandwidth_bps * 1e3;
  st.simulated_ms += inc;
  return inc;
}

struct SessionConfig {
  int n_parties = 3;
  int max_arity = 4;
  FixedCodec codec{16};
  u64 seed = 1;
  NetProfile net = net_low();
  u64 session_id = 1;
  double timeout_sec = 10.0; // deadlock detection for desynchronized parties
};

// A deferred reveal. The plaintext becomes readable after the next flush().
struct TicketState {
  bool resolved = false;
  int scale = 1;
  std::vector<u64> value;
};

class RevealTicket {
public:
  RevealTicket() = default;
  explicit RevealTicket(std::shared_ptr<TicketState> st) : st_(std::move(st)) {}

  bool resolved() const { return st_ && st_->resolved; }

  const std::vector<u64>& value() const {
    if (!resolved())
      throw UsageError("RevealTicket: read before flush resolved it");
    return st_->value;
  }

  int scale() const {
    if (!resolved())
      throw UsageError("RevealTicket: read before flush resolved it");
    return st_->scale;
  }

private:
  std::shared_ptr<TicketState> st_;
};

namespace detail {

// Synchronized all-to-all exchange board. A round completes only when all
// n parties contributed; partial rounds cannot be observed.
class ExchangeHub {
public:
  ExchangeHub(int n, double timeout_sec, bool metered, NetProfile net)
      : n_(n), timeout_(timeout_sec), metered_(metered), net_(std::move(net)) {
    frames_.resize(n_);
  }

  // Contribute this party's share list and wait for everyone; returns the
  // elementwise modular sums, one vector per input vector.
  std::vector<std::vector<u64>> exchange(int party, u64 corr,
                                         const std::vector<ShareVec>& shares) {
    std::size_t total = 0;
    std::vector<u64> lens(shares.size());
    for (std::size_t i = 0; i < shares.size(); ++i) {
      lens[i] = shares[i].size();
      total += shares[i].size();
    }
    if (total == 0 && shares.empty()) return {}; // vacuous, no round

    MessageFrame frame;
    frame.round = std::uint32_t(round_no_);
    frame.sender = std::uint32_t(party);
    frame.corr = corr;
    frame.payload.reserve(total);
    for (const auto& s : shares)
      frame.payload.insert(frame.payload.end(), s.v.begin(), s.v.end());
    auto bytes = frame.encode();

    std::unique_lock<std::mutex> lk(m_);
    throw_if_poisoned();
    const std::uint64_t gen = generation_;
    if (arrived_ == 0) {
      corr_pin_ = corr;
      lens_pin_ = lens;
    } else {
      if (corr != corr_pin_)
        fail_locked(std::make_exception_ptr(DesyncError(
            "exchange desync: party " + std::to_string(party) +
            " entered correlation " + std::to_string(corr) +
            " while round is correlation " + std::to_string(corr_pin_))));
      if (lens != lens_pin_)
        fail_locked(std::make_exception_ptr(
            DesyncError("exchange desync: payload shape mismatch at "
                        "correlation " +
                        std::to_string(corr))));
    }
    frames_[std::size_t(party)] = std::move(bytes);
    ++arrived_;

    if (arrived_ == n_) {
      aggregate_locked(lens);
      arrived_ = 0;
      ++generation_;
      ++round_no_;
      cv_.notify_all();
    } else {
      const bool ok = cv_.wait_for(
          lk, std::chrono::duration<double>(timeout_), [&] {
            return generation_ != gen || poison_ != nullptr;
          });
      if (!ok) {
        fail_locked(std::make_exception_ptr(SessionTimeout(
            "exchange timed out: correlation id " + std::to_string(corr) +
            " is blocked waiting for parties that never entered the round")));
      }
      throw_if_poisoned();
    }

    // Split the round sums back into per-input vectors.
    std::vector<std::vector<u64>> out(lens.size());
    std::size_t off = 0;
    for (std::size_t i = 0; i < lens.size(); ++i) {
      out[i].assign(sums_.begin() + off, sums_.begin() + off + lens[i]);
      off += lens[i];
    }
    return out;
  }

  void fail(std::exception_ptr e) {
    std::lock_guard<std::mutex> lk(m_);
    if (!poison_) poison_ = std::move(e);
    cv_.notify_all();
  }

  RoundStats stats_snapshot() const {
    std::lock_guard<std::mutex> lk(m_);
    return stats_;
  }

  RoundStats& stats_unsafe() { return stats_; } // single-threaded phases only

private:
  void aggregate_locked(const std::vector<u64>& lens) {
    std::size_t total = 0;
    for (u64 l : lens) total += l;
    sums_.assign(total, 0);
    u64 max_sent = 0;
    for (int p = 0; p < n_; ++p) {
      MessageFrame f = MessageFrame::decode(frames_[std::size_t(p)]);
      if (f.payload.size() != total)
        throw ProtocolError("exchange: corrupt frame");
      if (int(f.sender) >= n_) ++stats_.dealer_online_msgs;
      for (std::size_t i = 0; i < total; ++i)
        sums_[i] = ring_add(sums_[i], f.payload[i]);
      // all-to-all: each party sends its payload to the n-1 others
      max_sent = std::max(max_sent, u64(n_ - 1) * f.payload.size() * 8);
      frames_[std::size_t(p)].clear();
    }
    if (metered_) {
      stats_.online_rounds += 1;
      stats_.online_bytes += max_sent;
      advance_clock(stats_, max_sent, net_);
    }
  }

  void throw_if_poisoned() {
    if (poison_) std::rethrow_exception(poison_);
  }

  [[noreturn]] void fail_locked(std::exception_ptr e) {
    if (!poison_) poison_ = std::move(e);
    cv_.notify_all();
    std::rethrow_exception(poison_);
  }

  int n_;
  double timeout_;
  bool metered_;
  NetProfile net_;

  mutable std::mutex m_;
  std::condition_variable cv_;
  std::uint64_t generation_ = 0;
  int arrived_ = 0;
  std::uint64_t round_no_ = 0;
  u64 corr_pin_ = 0;
  std::vector<u64> lens_pin_;
  std::vector<std::vector<std::uint8_t>> frames_;
  std::vector<u64> sums_;
  std::exception_ptr poison_;
  RoundStats stats_;
};

// Requisition descriptor for one piece of correlated randomness.
struct RequestDesc {
  enum class Kind { kTriple, kAux, kMatmul } kind = Kind::kTriple;
  std::size_t len = 0;
  int arity = 0;
  std::size_t rows = 0, inner = 0, cols = 0;
  bool operator==(const RequestDesc&) const = default;
};

// Offline-phase gate used during the requisition pass: materializes dealer
// output on first request and cross-checks that every party requests the
// same sequence.
class OfflineGate {
public:
  OfflineGate(u64 seed, int n, u64 session_id)
      : dealer_(seed, n, session_id) {}

  TripleShare take_triple(int party, std::size_t idx, std::size_t len) {
    RequestDesc d{RequestDesc::Kind::kTriple, len, 0, 0, 0, 0};
    std::lock_guard<std::mutex> lk(m_);
    ensure_locked(idx, d);
    return triples_[idx][std::size_t(party)];
  }

  AuxShare take_aux(int party, std::size_t idx, int arity, std::size_t len) {
    RequestDesc d{RequestDesc::Kind::kAux, len, arity, 0, 0, 0};
    std::lock_guard<std::mutex> lk(m_);
    ensure_locked(idx, d);
    return auxes_[idx][std::size_t(party)];
  }

  MatTripleShare take_matmul(int party, std::size_t idx, std::size_t rows,
                             std::size_t inner, std::size_t cols) {
    RequestDesc d{RequestDesc::Kind::kMatmul, 0, 0, rows, inner, cols};
    std::lock_guard<std::mutex> lk(m_);
    ensure_locked(idx, d);
    return mats_[idx][std::size_t(party)];
  }

  const std::vector<RequestDesc>& schedule() const { return reqs_; }
  const Dealer& dealer() const { return dealer_; }

  // Serialize the full offline phase for one party into wire frames.
  std::vector<std::uint8_t> tape_for(int party) const {
    std::vector<std::uint8_t> buf;
    for (std::size_t i = 0; i < reqs_.size(); ++i) {
      switch (reqs_[i].kind) {
      case RequestDesc::Kind::kTriple:
        Dealer::write_triple(buf, triples_[i][std::size_t(party)],
                             dealer_.session_id());
        break;
      case RequestDesc::Kind::kAux:
        Dealer::write_aux(buf, auxes_[i][std::size_t(party)],
                          dealer_.session_id());
        break;
      case RequestDesc::Kind::kMatmul:
        Dealer::write_matmul(buf, mats_[i][std::size_t(party)],
                             dealer_.session_id());
        break;
      }
    }
    return buf;
  }

private:
  void ensure_locked(std::size_t idx, const RequestDesc& d) {
    if (idx < reqs_.size()) {
      if (!(reqs_[idx] == d))
        throw DesyncError(
            "correlated randomness requisition diverged between parties at "
            "request " +
            std::to_string(idx));
      return;
    }
    if (idx != reqs_.size())
      throw ProtocolError("offline gate: out-of-order requisition");
    reqs_.push_back(d);
    triples_.emplace_back();
    auxes_.emplace_back();
    mats_.emplace_back();
    switch (d.kind) {
    case RequestDesc::Kind::kTriple:
      triples_.back() = dealer_.gen_triple(d.len);
      break;
    case RequestDesc::Kind::kAux:
      auxes_.back() = dealer_.gen_aux(d.arity, d.len);
      break;
    case RequestDesc::Kind::kMatmul:
      mats_.back() = dealer_.gen_matmul(d.rows, d.inner, d.cols);
      break;
    }
  }

  std::mutex m_;
  Dealer dealer_;
  std::vector<RequestDesc> reqs_;
  std::vector<std::vector<TripleShare>> triples_;
  std::vector<std::vector<AuxShare>> auxes_;
  std::vector<std::vector<MatTripleShare>> mats_;
};

// Online-phase source of correlated randomness: one party's serialized
// offline tape, consumed in requisition order.
class TapeCursor {
public:
  TapeCursor() = default;
  TapeCursor(std::vector<std::uint8_t> bytes,
             const std::vector<RequestDesc>* schedule, u64 session, int party)
      : bytes_(std::move(bytes)),
        reader_(bytes_),
        schedule_(schedule),
        session_(session),
        party_(party) {}

  TripleShare take_triple(std::size_t len) {
    const auto& d = next_desc(RequestDesc::Kind::kTriple);
    if (d.len != len) throw ProtocolError("tape: triple shape mismatch");
    TripleShare t;
    t.a = read_vec(kRoleA, len, 1);
    t.b = read_vec(kRoleB, len, 1);
    t.c = read_vec(kRoleC, len, 2);
    t.corr = last_corr_;
    return t;
  }

  AuxShare take_aux(int arity, std::size_t len) {
    const auto& d = next_desc(RequestDesc::Kind::kAux);
    if (d.arity != arity || d.len != len)
      throw ProtocolError("tape: aux shape mismatch");
    AuxShare s;
    s.arity = arity;
    const std::uint32_t nmask = (1u << arity) - 1;
    s.entries.resize(nmask);
    for (std::uint32_t mask = 1; mask <= nmask; ++mask)
      s.entries[mask - 1] = read_vec(mask, len, 1);
    s.corr = last_corr_;
    return s;
  }

  MatTripleShare take_matmul(std::size_t rows, std::size_t inner,
                             std::size_t cols) {
    const auto& d = next_desc(RequestDesc::Kind::kMatmul);
    if (d.rows != rows || d.inner != inner || d.cols != cols)
      throw ProtocolError("tape: matrix triple shape mismatch");
    MatTripleShare t;
    t.rows = rows;
    t.inner = inner;
    t.cols = cols;
    t.a = read_mat(kRoleA, rows, inner);
    t.b = read_mat(kRoleB, inner, cols);
    t.c = read_mat(kRoleC, rows, cols);
    t.c.scale = 2;
    t.corr = last_corr_;
    return t;
  }

private:
  const RequestDesc& next_desc(RequestDesc::Kind kind) {
    if (!schedule_ || idx_ >= schedule_->size())
      throw ProtocolError("tape: requisition past end of offline schedule");
    const auto& d = (*schedule_)[idx_];
    if (d.kind != kind) throw ProtocolError("tape: requisition kind mismatch");
    ++idx_;
    return d;
  }

  ShareVec read_vec(std::uint32_t expect_tag, std::size_t rows,
                    std::size_t cols) {
    OfflineFrame f = OfflineFrame::decode_from(reader_);
    if (f.session != session_) throw ProtocolError("tape: session mismatch");
    if (f.tag != expect_tag) throw ProtocolError("tape: frame tag mismatch");
    if (f.rows != rows || f.cols != cols)
      throw ProtocolError("tape: frame shape mismatch");
    last_corr_ = f.corr;
    return ShareVec{party_, 1, std::move(f.elems)};
  }

  ShareVec read_mat(std::uint32_t role, std::size_t rows, std::size_t cols) {
    return read_vec(role, rows, cols);
  }

  std::vector<std::uint8_t> bytes_;
  WireReader reader_{std::span<const std::uint8_t>{}};
  const std::vector<RequestDesc>* schedule_ = nullptr;
  u64 session_ = 0;
  int party_ = 0;
  std::size_t idx_ = 0;
  u64 last_corr_ = 0;
};

} // namespace detail

// Per-party handle to a running session: identity, deterministic per-party
// randomness, the offline randomness supply, and the reveal primitives.
class PartyCtx {
public:
  int party() const { return party_; }
  int n_parties() const { return cfg_->n_parties; }
  int max_arity() const { return cfg_->max_arity; }
  const FixedCodec& codec() const { return cfg_->codec; }

  Rng64& rng() { return rng_; }
  ZeroShareGen& przs() { return przs_; }

  // True during the metered online pass. May be used to collect outputs or
  // metrics once; must not change the sequence of protocol operations.
  bool metered() const { return metered_; }

  TripleShare take_triple(std::size_t len) {
    const std::size_t idx = req_idx_++;
    return gate_ ? gate_->take_triple(party_, idx, len)
                 : tape_.take_triple(len);
  }

  AuxShare take_aux(int arity, std::size_t len) {
    if (arity < 2 || arity > cfg_->max_arity)
      throw ConfigError("take_aux: arity " + std::to_string(arity) +
                        " outside [2, max_arity=" +
                        std::to_string(cfg_->max_arity) + "]");
    const std::size_t idx = req_idx_++;
    return gate_ ? gate_->take_aux(party_, idx, arity, len)
                 : tape_.take_aux(arity, len);
  }

  MatTripleShare take_matmul(std::size_t rows, std::size_t inner,
                             std::size_t cols) {
    const std::size_t idx = req_idx_++;
    return gate_ ? gate_->take_matmul(party_, idx, rows, inner, cols)
                 : tape_.take_matmul(rows, inner, cols);
  }

  // One synchronized all-to-all reveal of a whole list of share vectors.
  // Counts exactly one round regardless of list length; an empty list is
  // free.
  std::vector<std::vector<u64>> exchange_reveal(
      const std::vector<ShareVec>& shares) {
    if (shares.empty()) return {};
    const u64 corr = corr_counter_++;
    return hub_->exchange(party_, corr, shares);
  }

  std::vector<u64> reveal(const ShareVec& s) {
    return exchange_reveal({s})[0];
  }

  RevealTicket defer_reveal(const ShareVec& s) {
    auto st = std::make_shared<TicketState>();
    st->scale = s.scale;
    pending_.push_back({s, st});
    return RevealTicket(st);
  }

  // Resolve every pending ticket with a single exchange (one round), or no
  // round at all if nothing is pending.
  void flush() {
    if (pending_.empty()) return;
    std::vector<ShareVec> batch;
    batch.reserve(pending_.size());
    for (auto& p : pending_) batch.push_back(std::move(p.share));
    auto sums = exchange_reveal(batch);
    for (std::size_t i = 0; i < pending_.size(); ++i) {
      pending_[i].st->value = std::move(sums[i]);
      pending_[i].st->resolved = true;
    }
    pending_.clear();
  }

  RoundStats stats_snapshot() const { return hub_->stats_snapshot(); }

private:
  friend class Session;

  struct Pending {
    ShareVec share;
    std::shared_ptr<TicketState> st;
  };

  PartyCtx(const SessionConfig* cfg, int party, detail::ExchangeHub* hub,
           detail::OfflineGate* gate, detail::TapeCursor tape, bool metered)
      : cfg_(cfg),
        party_(party),
        hub_(hub),
        gate_(gate),
        tape_(std::move(tape)),
        metered_(metered),
        rng_(splitmix64(cfg->seed ^ 0x9d2c5680u) ^ (u64(party) << 1)),
        przs_(cfg->seed, cfg->n_parties, party) {}

  const SessionConfig* cfg_;
  int party_;
  detail::ExchangeHub* hub_;
  detail::OfflineGate* gate_; // requisition pass only
  detail::TapeCursor tape_;   // online pass only
  bool metered_;
  Rng64 rng_;
  ZeroShareGen przs_;
  u64 corr_counter_ = 0;
  std::size_t req_idx_ = 0;
  std::vector<Pending> pending_;
};

struct SessionResult {
  RoundStats stats;
  double t_comp_ms = 0.0; // wall clock, max over parties, online pass
};

// Runs a deterministic per-party program over the protocol API. The dealer
// completes the whole offline phase before the first online round: a silent
// requisition pass records and materializes every correlated-randomness
// request, the material is serialized into per-party offline tapes, and the
// metered online pass consumes the tapes. Both passes execute the same
// program with identical per-party randomness, so they are bit-identical;
// only the online pass drives the virtual clock.
class Session {
public:
  explicit Session(SessionConfig cfg) : cfg_(std::move(cfg)) {
    if (cfg_.n_parties < 2)
      throw ConfigError("SessionConfig: n_parties must be >= 2");
    if (cfg_.max_arity < 2)
      throw ConfigError("SessionConfig: max_arity must be >= 2");
  }

  const SessionConfig& config() const { return cfg_; }

  SessionResult run(const std::function<void(PartyCtx&)>& program) {
    const int n = cfg_.n_parties;

    // Requisition pass: full execution, nothing metered.
    detail::OfflineGate gate(cfg_.seed, n, cfg_.session_id);
    {
      detail::ExchangeHub hub(n, cfg_.timeout_sec, false, cfg_.net);
      run_parties(program, hub, &gate, nullptr, nullptr);
    }

    // Offline phase complete: distribute tapes.
    std::vector<std::vector<std::uint8_t>> tapes(static_cast<std::size_t>(n));
    for (int p = 0; p < n; ++p) tapes[std::size_t(p)] = gate.tape_for(p);

    // Online pass: consume tapes, meter rounds and the virtual clock.
    detail::ExchangeHub hub(n, cfg_.timeout_sec, true, cfg_.net);
    hub.stats_unsafe().offline_bytes = gate.dealer().offline_bytes_per_party();
    double t_comp_ms = 0.0;
    run_parties(program, hub, nullptr, &tapes, &t_comp_ms);

    SessionResult res;
    res.stats = hub.stats_snapshot();
    res.t_comp_ms = t_comp_ms;
    return res;
  }

private:
  void run_parties(const std::function<void(PartyCtx&)>& program,
                   detail::ExchangeHub& hub, detail::OfflineGate* gate,
                   std::vector<std::vector<std::uint8_t>>* tapes,
                   double* t_comp_ms) {
    const int n = cfg_.n_parties;
    std::vector<std::thread> threads;
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(n));
    std::vector<double> wall_ms(std::size_t(n), 0.0);
    const auto* schedule = gate ? nullptr : &gate_schedule_;
    threads.reserve(std::size_t(n));
    for (int p = 0; p < n; ++p) {
      threads.emplace_back([&, p] {
        try {
          detail::TapeCursor cursor;
          if (tapes)
            cursor = detail::TapeCursor((*tapes)[std::size_t(p)], schedule,
                                        cfg_.session_id, p);
          PartyCtx ctx(&cfg_, p, &hub, gate, std::move(cursor),
                       tapes != nullptr);
          const auto t0 = std::chrono::steady_clock::now();
          program(ctx);
          const auto t1 = std::chrono::steady_clock::now();
          wall_ms[std::size_t(p)] =
              std::chrono::duration<double, std::milli>(t1 - t0).count();
        } catch (...) {
          errors[std::size_t(p)] = std::current_exception();
          hub.fail(std::current_exception());
        }
      });
    }
    for (auto& t : threads) t.join();
    if (gate) gate_schedule_ = gate->schedule();
    for (auto& e : errors)
      if (e) std::rethrow_exception(e);
    if (t_comp_ms)
      for (double w : wall_ms) *t_comp_ms = std::max(*t_comp_ms, w);
  }

  SessionConfig cfg_;
  std::vector<detail::RequestDesc> gate_schedule_;
};

} // namespace nbeaver
