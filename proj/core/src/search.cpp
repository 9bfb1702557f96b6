#include "levinforge/search.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <condition_variable>
#include <map>
#include <mutex>
#include <optional>
#include <thread>
#include <utility>

#include "levinforge/enumerate.hpp"

namespace levinforge {

namespace {

// Fixed-size thread team that replays run() batches. The caller thread
// participates in every batch, so Pool(1) degenerates to a plain loop.
class Pool {
 public:
  explicit Pool(int32_t workers) {
    for (int32_t i = 1; i < workers; ++i) {
      threads_.emplace_back([this] { worker_loop(); });
    }
  }

  Pool(const Pool&) = delete;
  Pool& operator=(const Pool&) = delete;

  ~Pool() {
    {
      std::unique_lock<std::mutex> lock(m_);
      stop_ = true;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  // Invokes fn(k) exactly once for each k in [0, njobs); returns after all
  // invocations complete. fn must be safe to call concurrently.
  void run(int64_t njobs, const std::function<void(int64_t)>& fn) {
    if (njobs <= 0) return;
    {
      std::unique_lock<std::mutex> lock(m_);
      fn_ = &fn;
      njobs_ = njobs;
      next_.store(0, std::memory_order_relaxed);
      done_.store(0, std::memory_order_relaxed);
      ++generation_;
    }
    cv_.notify_all();
    drain();
    {
      std::unique_lock<std::mutex> lock(m_);
      done_cv_.wait(lock, [this] {
        return done_.load(std::memory_order_acquire) >= njobs_;
      });
      fn_ = nullptr;
    }
  }

 private:
  void drain() {
    for (;;) {
      int64_t k = next_.fetch_add(1, std::memory_order_relaxed);
      if (k >= njobs_) break;
      (*fn_)(k);
      if (done_.fetch_add(1, std::memory_order_acq_rel) + 1 == njobs_) {
        done_cv_.notify_all();
      }
    }
  }

  void worker_loop() {
    uint64_t seen = 0;
    for (;;) {
      {
        std::unique_lock<std::mutex> lock(m_);
        cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
        if (stop_) return;
        seen = generation_;
      }
      drain();
    }
  }

  std::vector<std::thread> threads_;
  std::mutex m_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::function<void(int64_t)>* fn_ = nullptr;
  int64_t njobs_ = 0;
  std::atomic<int64_t> next_{0};
  std::atomic<int64_t> done_{0};
  uint64_t generation_ = 0;
  bool stop_ = false;
};

struct Passer {
  double probability = 0.0;
  std::string serialization;
  Program program;
  int64_t consumed = 0;
};

// Winner order: probability descending, then serialization ascending.
bool passer_before(const Passer& a, const Passer& b) {
  if (a.probability != b.probability) return a.probability > b.probability;
  return a.serialization < b.serialization;
}

struct PendingJob {
  Program program;
  double probability = 0.0;
  int64_t fuel = 0;
};

constexpr int64_t kBatchSize = 1024;

void validate_config(const SearchConfig& config) {
  if (config.t0 < 1) throw SearchError("search t0 must be at least 1");
  if (config.t0 > (int64_t{1} << 40)) {
    throw SearchError("search t0 too large");
  }
  if (config.max_phases < 1 || config.max_phases > 57) {
    throw SearchError("search max_phases must be in [1, 57]");
  }
  if (config.workers < 1 || config.workers > 256) {
    throw SearchError("search workers must be in [1, 256]");
  }
}

SearchResult search_impl(const Grammar& g, const CandidateTest& test,
                         const SearchConfig& config, int32_t extra_phases) {
  validate_config(config);
  if (extra_phases < 0) throw SearchError("extra_phases must be >= 0");
  if (!test) throw SearchError("candidate test is empty");

  SearchResult result;
  std::optional<Passer> winner;
  // Distinct passers seen so far, keyed by serialization. A program's
  // probability does not vary across phases, so first sighting wins.
  std::map<std::string, Passer> seen_passers;

  std::optional<Pool> pool;
  if (config.workers > 1) pool.emplace(config.workers);

  int32_t stop_after = -1;  // last phase index to run once solved
  for (int32_t phase = 0; phase < config.max_phases; ++phase) {
    const int64_t budget = config.t0 << phase;
    const double theta = 1.0 / static_cast<double>(budget);

    std::vector<Passer> phase_passers;
    auto run_one = [&](const Program& prog, double probability,
                       const TestOutcome& out) {
      result.total_steps_spent += out.consumed;
      if (out.passed) {
        Passer p;
        p.probability = probability;
        p.serialization = serialize(prog, g.names);
        p.program = extract_subtree(prog, prog.root);
        p.consumed = out.consumed;
        phase_passers.push_back(std::move(p));
      }
    };

    if (config.workers == 1) {
      for_each_program(g, theta, [&](const Candidate& c) {
        const int64_t fuel = static_cast<int64_t>(
            std::floor(static_cast<double>(budget) * c.probability));
        if (fuel < 1) return true;
        run_one(*c.program, c.probability, test(*c.program, fuel));
        return true;
      });
    } else {
      std::vector<PendingJob> jobs;
      std::vector<TestOutcome> outcomes;
      jobs.reserve(kBatchSize);
      auto flush = [&] {
        if (jobs.empty()) return;
        outcomes.assign(jobs.size(), TestOutcome{});
        pool->run(static_cast<int64_t>(jobs.size()), [&](int64_t k) {
          outcomes[static_cast<size_t>(k)] =
              test(jobs[static_cast<size_t>(k)].program,
                   jobs[static_cast<size_t>(k)].fuel);
        });
        // Reduce in enumeration order so results are independent of
        // thread scheduling.
        for (size_t k = 0; k < jobs.size(); ++k) {
          run_one(jobs[k].program, jobs[k].probability, outcomes[k]);
        }
        jobs.clear();
      };
      for_each_program(g, theta, [&](const Candidate& c) {
        const int64_t fuel = static_cast<int64_t>(
            std::floor(static_cast<double>(budget) * c.probability));
        if (fuel < 1) return true;
        PendingJob job;
        job.program = extract_subtree(*c.program, c.program->root);
        job.probability = c.probability;
        job.fuel = fuel;
        jobs.push_back(std::move(job));
        if (static_cast<int64_t>(jobs.size()) >= kBatchSize) flush();
        return true;
      });
      flush();
    }

    result.phases_run = phase + 1;

    if (!phase_passers.empty() && result.success_phase < 0) {
      result.success_phase = phase;
      auto best = std::min_element(
          phase_passers.begin(), phase_passers.end(),
          [](const Passer& a, const Passer& b) { return passer_before(a, b); });
      winner = *best;
      if (!config.keep_searching_after_first) {
        stop_after = phase + extra_phases;
        if (stop_after >= config.max_phases) {
          stop_after = config.max_phases - 1;
        }
      }
    }

    for (auto& p : phase_passers) {
      auto it = seen_passers.find(p.serialization);
      if (it == seen_passers.end()) {
        std::string key = p.serialization;
        seen_passers.emplace(std::move(key), std::move(p));
      }
    }

    if (stop_after >= 0 && phase >= stop_after) break;
  }

  if (!winner.has_value()) {
    result.status = SearchStatus::BudgetExhausted;
    return result;
  }

  result.status = SearchStatus::Solved;
  result.solution = winner->program;
  result.solution_text = winner->serialization;
  result.solution_probability = winner->probability;
  result.solution_steps = winner->consumed;
  result.cjs =
      static_cast<double>(winner->consumed) / winner->probability;
  auto deriv = canonical_derivation(g, result.solution);
  if (!deriv.has_value()) {
    throw SearchError("winning program lost its derivation");
  }
  result.derivation = std::move(*deriv);

  result.alternatives.reserve(seen_passers.size());
  for (auto& [ser, p] : seen_passers) {
    FoundProgram f;
    f.program = std::move(p.program);
    f.serialization = ser;
    f.probability = p.probability;
    result.alternatives.push_back(std::move(f));
  }
  std::sort(result.alternatives.begin(), result.alternatives.end(),
            [](const FoundProgram& a, const FoundProgram& b) {
              if (a.probability != b.probability) {
                return a.probability > b.probability;
              }
              return a.serialization < b.serialization;
            });
  return result;
}

}  // namespace

SearchResult levin_search(const Grammar& g, const CandidateTest& test,
                          const SearchConfig& config) {
  return search_impl(g, test, config, 0);
}

SearchResult rerun_for_alternatives(const Grammar& g,
                                    const CandidateTest& test,
                                    const SearchConfig& config,
                                    int32_t extra_phases) {
  return search_impl(g, test, config, extra_phases);
}

}  // namespace levinforge
