// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <sstream>
#include <string>
#include <vector>

#include "odesa/harness/commands.hpp"
#include "odesa/odesa.hpp"
#include "oracles.hpp"

using namespace odesa;
using namespace odesa::harness;
namespace fs = std::filesystem;

namespace {

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string list(const std::vector<double>& v, const char* f = "%.3f") {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + fmt(f, v[i]);
  return s + "]";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ExperimentConfig config(const std::string& name) {
  return load_experiment_config(std::string(ODESA_CONFIG_DIR) + "/" + name + ".json");
}

RunResult run(const ExperimentConfig& cfg, std::uint64_t seed) {
  return train_run(cfg, seed, make_split(cfg, seed, selector_for(cfg)));
}

Verdict time_surface_oracle() {
  Rng rng(1);
  double worst = 0.0;
  for (int trial = 0; trial < 1000; ++trial) {
    const auto train = oracle::random_train(rng, 10, 200);
    const double tau = rng.uniform(0.1, 10.0);
    TimeSurface ts(train.channels, tau);
    for (const auto& e : train.events) ts.update(e);
    for (int r = 0; r < 20; ++r) {
      const double t = train.last + rng.uniform(0.0, 3.0 * tau);
      const auto got = ts.read(t);
      const auto want = oracle::surface(train.events, train.channels, tau, 1.0, t);
      for (std::size_t i = 0; i < got.size(); ++i) worst = std::max(worst, std::abs(got[i] - want[i]));
    }
  }
  return {worst <= 1e-9, "max |error| " + fmt("%.3g", worst)};
}

std::vector<double> parameters(const Network& net) {
  std::vector<double> out;
  for (std::size_t l = 0; l < net.layer_count(); ++l) {
    out.insert(out.end(), net.layer(l).weight_matrix().begin(), net.layer(l).weight_matrix().end());
    out.insert(out.end(), net.layer(l).thresholds().begin(), net.layer(l).thresholds().end());
  }
  return out;
}

Verdict invariants() {
  std::vector<std::string> broken;
  Rng rng(2);

  // Unit rows and threshold monotonicity under 1e5 reward/punish operations.
  {
    LayerParams p;
    p.n_neurons = 8;
    p.n_inputs = 6;
    p.tau_input = 1.0;
    p.eta = 0.3;
    p.eta_thresh = 0.2;
    p.theta_open = 0.01;
    p.theta_init = 0.0;
    Layer layer(p, 2);
    double t = 0.0, worst = 0.0;
    bool monotone = true;
    for (int ops = 0; ops < 100000;) {
      if (rng.uniform() < 0.5) {
        layer.forward({rng.below(p.n_inputs), t += rng.uniform(0.0, 0.5)});
        continue;
      }
      const std::size_t n = rng.below(p.n_neurons);
      if (rng.uniform() < 0.7) {
        const double before = layer.thresholds()[n];
        layer.reward(n);
        monotone = monotone && layer.thresholds()[n] >= before;
      } else {
        layer.punish(n);
      }
      ++ops;
    }
    for (std::size_t n = 0; n < p.n_neurons; ++n) {
      const auto w = layer.weights(n);
      worst = std::max(worst, std::abs(std::sqrt(std::inner_product(w.begin(), w.end(), w.begin(), 0.0)) - 1.0));
    }
    if (worst > 1e-9) broken.push_back("unit norm off by " + fmt("%.3g", worst));
    if (!monotone) broken.push_back("reward lowered a threshold");
  }

  // Reward-only sequences never push a threshold to 1.
  for (int trial = 0; trial < 50; ++trial) {
    LayerParams p;
    p.n_neurons = rng.between(1, 6);
    p.n_inputs = rng.between(1, 6);
    p.tau_input = rng.uniform(0.1, 5.0);
    p.eta = rng.uniform(0.01, 1.0);
    p.eta_thresh = rng.uniform(0.01, 1.0);
    p.theta_init = rng.uniform(0.0, 0.999);
    Layer layer(p, trial);
    double t = 0.0;
    for (int i = 0; i < 2000; ++i) {
      const auto s = layer.forward({rng.below(p.n_inputs), t += rng.uniform(0.0, 1.0)});
      if (s) layer.reward(s->channel);
    }
    for (double th : layer.thresholds()) {
      if (!(th < 1.0)) {
        broken.push_back("threshold reached 1 under rewards");
        trial = 50;
        break;
      }
    }
  }

  // Spike counts and unlabeled-event updates over random labeled streams.
  std::size_t events = 0;
  for (int trial = 0; trial < 20; ++trial) {
    NetworkConfig c;
    c.n_inputs = rng.between(2, 8);
    const std::size_t layers = trial % 3 == 0 ? 2 : 1;
    for (std::size_t h = 0; h < layers; ++h) {
      LayerParams hp;
      hp.n_neurons = rng.between(2, 10);
      hp.tau_input = rng.uniform(0.5, 5.0);
      hp.eta = 0.1;
      hp.eta_thresh = 0.1;
      hp.theta_open = 0.01;
      hp.theta_init = 0.0;
      c.hidden.push_back(hp);
    }
    c.output.n_classes = rng.between(2, 4);
    c.output.k = rng.between(1, 3);
    c.output.tau_input = rng.uniform(1.0, 10.0);
    c.output.theta_init = 0.0;
    c.seed = trial;
    c.link();
    Network net(c);
    double t = 0.0;
    for (int i = 0; i < 2000; ++i, ++events) {
      if (rng.uniform() < 0.8) t += rng.uniform(0.0, 0.5);
      std::optional<LabeledEvent> label;
      if (rng.uniform() < 0.05) label = LabeledEvent{rng.below(c.output.n_classes), t};
      std::vector<std::vector<double>> last(net.layer_count());
      for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto ls = net.layer(l).traces().last_spikes();
        last[l].assign(ls.begin(), ls.end());
      }
      const auto before = parameters(net);
      net.train_step({rng.below(c.n_inputs), t}, label);
      for (std::size_t l = 0; l < net.layer_count(); ++l) {
        const auto ls = net.layer(l).traces().last_spikes();
        std::size_t fired = 0;
        for (std::size_t n = 0; n < ls.size(); ++n) fired += ls[n] != last[l][n];
        if (fired > 1) broken.push_back("layer " + std::to_string(l) + " fired " + std::to_string(fired) + " neurons");
      }
      // Hidden-to-hidden local attention is driven by hidden spikes alone,
      // so the zero-update check applies to networks with one hidden layer.
      if (!label && layers == 1 && parameters(net) != before) broken.push_back("update at an unlabeled event");
    }
  }
  if (broken.size() > 3) broken.resize(3);
  std::string detail = "1e5 reward/punish ops, 50 reward-only layers, " + std::to_string(events) + " network events";
  for (const auto& b : broken) detail += "; " + b;
  return {broken.empty(), detail};
}

Verdict random_pattern() {
  const auto cfg = config("random_pattern");
  if (cfg.training.epochs > 10) return {false, "config trains for more than 10 epochs"};
  std::vector<double> acc;
  for (auto s : cfg.seeds) acc.push_back(run(cfg, s).epochs.back().accuracy());
  const double m = median(acc);
  return {acc.size() == 5 && m >= 0.9, "epoch-" + std::to_string(cfg.training.epochs) + " training accuracy " +
                                           list(acc) + ", median " + fmt("%.3f", m) + " (need >= 0.9)"};
}

Verdict iris(const std::string& name, double need) {
  const auto cfg = config(name);
  std::vector<double> acc;
  for (auto s : cfg.seeds) acc.push_back(run(cfg, s).test.accuracy());
  const double m = median(acc);
  return {acc.size() == 5 && cfg.training.epochs == 400 && m >= need,
          "test accuracy " + list(acc) + ", median " + fmt("%.3f", m) + " (need >= " + fmt("%.2f", need) + ")"};
}

// Seeds whose frozen pass over the training stream gets every label right.
Verdict morse_all_correct(const std::string& name, std::size_t max_epochs) {
  const auto cfg = config(name);
  std::size_t good = 0;
  std::vector<double> hits;
  for (auto s : cfg.seeds) {
    const auto r = run(cfg, s);
    hits.push_back(static_cast<double>(r.final_train.hits));
    good += r.final_train.n_labels > 0 && r.final_train.hits == r.final_train.n_labels;
  }
  return {cfg.seeds.size() == 5 && cfg.training.epochs <= max_epochs && good >= 4,
          std::to_string(good) + "/5 seeds fully correct, label hits per seed " + list(hits, "%.0f") + " (need >= 4)"};
}

Verdict sonnet() {
  const auto cfg = config("morse_sonnet");
  if (cfg.network.hidden.size() != 2) return {false, "config is not a 3-layer network"};
  std::vector<double> lines;
  for (auto s : cfg.seeds) {
    const auto r = run(cfg, s);
    std::size_t ok = 0;
    for (std::size_t c = 0; c < r.final_train.labels_per_class.size(); ++c) {
      ok += r.final_train.labels_per_class[c] > 0 && r.final_train.hits_per_class[c] == r.final_train.labels_per_class[c];
    }
    lines.push_back(static_cast<double>(ok));
  }
  const double m = median(lines);
  return {lines.size() == 5 && m >= 3.0,
          "lines correct per seed " + list(lines, "%.0f") + ", median " + fmt("%.1f", m) + " (need >= 3 of 4)"};
}

Verdict csv_round_trip() {
  Rng rng(9);
  Stream s;
  s.n_channels = 30;
  double t = 0.0;
  for (int i = 0; i < 100000; ++i) {
    if (rng.uniform() < 0.9) t = quantize_time(t + rng.uniform(0.0, 0.01));
    s.events.push_back({rng.below(30), t});
  }
  for (std::size_t i = 999; i < s.events.size(); i += 1000) s.labels.push_back({rng.below(10), s.events[i].time});
  const auto dir = fs::temp_directory_path() / "odesa_acceptance_csv";
  fs::create_directories(dir);
  const auto ev = (dir / "spikes.csv").string(), lb = (dir / "labels.csv").string();
  save_spike_csv(ev, lb, s);
  const Stream back = load_spike_csv(ev, lb, 30, 10);
  fs::remove_all(dir);
  bool same = back.events.size() == s.events.size() && back.labels.size() == s.labels.size();
  for (std::size_t i = 0; same && i < s.events.size(); ++i) {
    same = back.events[i].channel == s.events[i].channel && back.events[i].time == s.events[i].time;
  }
  for (std::size_t i = 0; same && i < s.labels.size(); ++i) {
    same = back.labels[i].class_id == s.labels[i].class_id && back.labels[i].time == s.labels[i].time;
  }
  return {same, "100000 events on 30 channels, " + std::to_string(s.labels.size()) + " labels" +
                    (same ? ", identical after reload" : ", mismatch after reload")};
}

Verdict determinism() {
  const auto cfg = config("iris_50_50");
  const auto seed = cfg.seeds.front();
  const auto a = fs::temp_directory_path() / "odesa_acceptance_a", b = fs::temp_directory_path() / "odesa_acceptance_b";
  fs::remove_all(a);
  fs::remove_all(b);
  train_run(cfg, seed, make_split(cfg, seed, selector_for(cfg)), RunOutputs{a});
  train_run(cfg, seed, make_split(cfg, seed, selector_for(cfg)), RunOutputs{b});
  std::string detail;
  bool same = true;
  for (const char* f : {"metrics.json", "events.csv"}) {
    const auto x = slurp(a / f), y = slurp(b / f);
    const bool eq = !x.empty() && x == y;
    same = same && eq;
    detail += std::string(detail.empty() ? "" : ", ") + f + (eq ? " identical" : " differs") + " (" +
              std::to_string(x.size()) + " bytes)";
  }
  fs::remove_all(a);
  fs::remove_all(b);
  return {same, detail};
}

}  // namespace

int main() {
  struct Criterion {
    int id;
    const char* name;
    double budget;  // seconds
    std::function<Verdict()> check;
  };
  const std::vector<Criterion> criteria = {
      {1, "time-surface oracle", 5, time_surface_oracle},
      {2, "invariant suite", 30, invariants},
      {3, "random pattern association", 60, random_pattern},
      {4, "IRIS 50/50", 300, [] { return iris("iris_50_50", 0.88); }},
      {5, "IRIS 75/25", 300, [] { return iris("iris_75_25", 0.90); }},
      {6, "Morse names", 120, [] { return morse_all_correct("morse_names", 200); }},
      {7, "Morse positional", 120, [] { return morse_all_correct("morse_positional", 1000000); }},
      {8, "Morse sonnet", 300, sonnet},
      {9, "spike CSV round trip", 2, csv_round_trip},
      {10, "determinism", 1e9, determinism},
  };
  int failed = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = c.check();
    } catch (const std::exception& e) {
      v = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    const bool in_time = secs < c.budget;
    const bool pass = v.pass && in_time;
    failed += !pass;
    std::printf("%s %2d %s: %s; %.2f s%s\n", pass ? "PASS" : "FAIL", c.id, c.name, v.detail.c_str(), secs,
                in_time ? "" : " (over time budget)");
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
