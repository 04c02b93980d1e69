#include "distwatch/monitor.hpp"

#include <algorithm>
#include <chrono>
#include <exception>
#include <ostream>
#include <string>

#include "common/text.hpp"
#include "distwatch/errors.hpp"

namespace distwatch {

std::size_t FrameReport::violating_pairs() const noexcept {
  return static_cast<std::size_t>(std::count_if(pairs.begin(), pairs.end(), [](const auto& p) { return p.violating; }));
}

SessionStats SessionStats::from_report(const FrameReport& report) {
  SessionStats s;
  s.frames = 1;
  s.persons = report.person_count();
  s.pairs = report.pairs.size();
  for (const DistanceRecord& p : report.pairs) {
    ++s.risk_pairs[static_cast<std::size_t>(p.risk)];
    if (p.violating) ++s.violating_pairs;
  }
  s.max_simultaneous_violations = s.violating_pairs;
  s.unsafe_frames = report.verdict == Verdict::Unsafe ? 1 : 0;
  return s;
}

SessionStats& SessionStats::merge(const SessionStats& o) {
  frames += o.frames;
  persons += o.persons;
  pairs += o.pairs;
  violating_pairs += o.violating_pairs;
  for (std::size_t k = 0; k < risk_pairs.size(); ++k) risk_pairs[k] += o.risk_pairs[k];
  max_simultaneous_violations = std::max(max_simultaneous_violations, o.max_simultaneous_violations);
  unsafe_frames += o.unsafe_frames;
  error_frames += o.error_frames;
  elapsed_seconds += o.elapsed_seconds;
  return *this;
}

double SessionStats::fps() const noexcept { return elapsed_seconds > 0.0 ? frames / elapsed_seconds : 0.0; }

bool SessionStats::same_counts(const SessionStats& o) const noexcept {
  return frames == o.frames && persons == o.persons && pairs == o.pairs && violating_pairs == o.violating_pairs &&
         risk_pairs == o.risk_pairs && max_simultaneous_violations == o.max_simultaneous_violations &&
         unsafe_frames == o.unsafe_frames && error_frames == o.error_frames;
}

std::vector<Detection> filter_persons(std::span<const Detection> dets, const ClassRegistry& registry) {
  std::vector<Detection> out;
  std::copy_if(dets.begin(), dets.end(), std::back_inserter(out),
               [&](const Detection& d) { return registry.is_person(d.class_id); });
  return out;
}

FrameReport build_report(std::uint64_t frame_index, std::span<const Detection> dets, const MonitorConfig& cfg) {
  FrameReport r;
  r.frame_index = frame_index;
  r.persons = filter_persons(dets, cfg.registry);
  r.centroids.reserve(r.persons.size());
  for (std::size_t k = 0; k < r.persons.size(); ++k) r.centroids.push_back(centroid(r.persons[k], k));
  r.pairs = pairwise(r.centroids, cfg.thresholds, cfg.calibration);

  const std::size_t n = r.persons.size();
  r.person_risk.assign(n, std::nullopt);
  std::vector<bool> violating(n, false);
  auto worsen = [](std::optional<RiskLevel>& slot, RiskLevel level) {
    if (!slot || static_cast<int>(level) > static_cast<int>(*slot)) slot = level;
  };
  for (const DistanceRecord& p : r.pairs) {
    worsen(r.person_risk[p.i], p.risk);
    worsen(r.person_risk[p.j], p.risk);
    if (p.violating) violating[p.i] = violating[p.j] = true;
  }
  for (std::size_t k = 0; k < n; ++k) (violating[k] ? r.violating : r.safe).push_back(k);
  r.verdict = r.violating.empty() ? Verdict::Safe : Verdict::Unsafe;
  return r;
}

FrameReport process_frame(const FrameInfo& frame, const Image* pixels, Backend& backend, const MonitorConfig& cfg) {
  const std::vector<Detection> dets = backend.detections_for(frame, pixels);
  return build_report(frame.index, dets, cfg);
}

std::string format_report(const FrameReport& report) {
  std::string out = "frame=" + std::to_string(report.frame_index) + " persons=" +
                    std::to_string(report.person_count()) + " pairs=" + std::to_string(report.pairs.size()) +
                    " violations=" + std::to_string(report.violating_pairs()) +
                    " verdict=" + (report.verdict == Verdict::Unsafe ? "unsafe" : "safe") + "\n";
  for (const DistanceRecord& p : report.pairs) {
    out += "pair ";
    out += std::to_string(p.i);
    out += ' ';
    out += std::to_string(p.j);
    out += " d_px=";
    out += text::fixed(p.distance_px, 3);
    out += " d_units=";
    out += p.distance_units ? text::fixed(*p.distance_units, 3) : std::string("NA");
    out += " risk=";
    out += risk_code(p.risk);
    out += " viol=";
    out += p.violating ? '1' : '0';
    out += '\n';
  }
  return out;
}

void write_report(std::ostream& out, const FrameReport& report) { out << format_report(report); }

namespace {

struct FrameOutcome {
  std::optional<FrameReport> report;
  std::optional<FrameError> error;
  std::optional<Image> annotated;
  std::exception_ptr fatal;
};

std::string annotated_name(std::uint64_t index) { return "frame_" + std::to_string(index) + ".ppm"; }

}  // namespace

SessionStats run_session(const FrameFeed& frames, Backend& backend, const MonitorConfig& cfg,
                         const SessionSinks& sinks, const SessionOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  SessionStats stats;
  const std::size_t batch_size = std::max<std::size_t>(1, options.batch_size);
  const bool parallel_ok = backend.concurrent();
  if (sinks.annotate_dir) std::filesystem::create_directories(*sinks.annotate_dir);

  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  std::vector<SessionInput> batch;
  std::vector<FrameOutcome> outcomes;
  while (true) {
    batch.clear();
    while (batch.size() < batch_size) {
      auto item = frames();
      if (!item) break;
      batch.push_back(std::move(*item));
    }
    if (batch.empty()) break;

    outcomes.assign(batch.size(), FrameOutcome{});
    const auto count = static_cast<std::ptrdiff_t>(batch.size());
#pragma omp parallel for schedule(dynamic, 1) if (parallel_ok && count > 1)
    for (std::ptrdiff_t k = 0; k < count; ++k) {
      const SessionInput& in = batch[static_cast<std::size_t>(k)];
      FrameOutcome& out = outcomes[static_cast<std::size_t>(k)];
      try {
        out.report = process_frame(in.info, in.image ? &*in.image : nullptr, backend, cfg);
        if (sinks.annotate_dir && in.image) out.annotated = annotate(*in.image, *out.report);
      } catch (const NoDetectionsRecorded& e) {
        out.error = FrameError{in.info.index, e.what()};
      } catch (const FormatError& e) {
        out.error = FrameError{in.info.index, e.what()};
      } catch (...) {
        out.fatal = std::current_exception();
      }
    }

    // Sinks run in frame order on this thread.
    for (FrameOutcome& out : outcomes) {
      if (out.fatal) {
        if (sinks.report) sinks.report->flush();
        stats.elapsed_seconds = elapsed();
        std::string what = "session aborted";
        try {
          std::rethrow_exception(out.fatal);
        } catch (const std::exception& e) {
          what += ": ";
          what += e.what();
        } catch (...) {
        }
        throw SessionAborted(what, stats);
      }
      if (out.error) {
        ++stats.error_frames;
        if (sinks.on_error) sinks.on_error(*out.error);
        continue;
      }
      stats.merge(SessionStats::from_report(*out.report));
      if (sinks.report) write_report(*sinks.report, *out.report);
      if (out.annotated) write_ppm(*sinks.annotate_dir / annotated_name(out.report->frame_index), *out.annotated);
      if (sinks.on_report) sinks.on_report(*out.report);
    }
  }
  if (sinks.report) sinks.report->flush();
  stats.elapsed_seconds = elapsed();
  return stats;
}

FrameFeed feed_from_indices(std::vector<std::uint64_t> indices, FrameDims dims) {
  auto state = std::make_shared<std::pair<std::vector<std::uint64_t>, std::size_t>>(std::move(indices), 0);
  return [state, dims]() -> std::optional<SessionInput> {
    auto& [list, pos] = *state;
    if (pos >= list.size()) return std::nullopt;
    return SessionInput{FrameInfo{list[pos++], dims.width, dims.height}, std::nullopt};
  };
}

FrameFeed feed_from_source(FrameSource& source) {
  return [&source]() -> std::optional<SessionInput> {
    auto frame = source.next();
    if (!frame) return std::nullopt;
    FrameInfo info{frame->index, frame->image.width(), frame->image.height()};
    return SessionInput{info, std::move(frame->image)};
  };
}

}  // namespace distwatch
