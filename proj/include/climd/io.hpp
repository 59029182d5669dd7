#pragma once

// Text interchange formats.
//
//   traces        JSON lines: {"sample_id", "label", "modalities": [{"probs", "embedding"}]}
//   labels        sample_id,label            (header optional)
//   predictions   sample_id,true,pred        (header optional)
//   difficulty    sample_id,label,phi,psi_1..psi_M,r
//   distribution  "# key=value" preamble, then class_id,count,rank
//   schedule      epoch,class_id,rank,s_t,sample_ids...
//   summary       epoch,rank_1..rank_C        (per-rank counts)
//   targets       epoch,alpha_t,s_t,q_1..q_C
//
// Readers throw ValidationError prefixed with "<source>:<line>:".

#include <cstddef>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "climd/distribution.hpp"
#include "climd/measurer.hpp"
#include "climd/scheduler.hpp"

namespace climd {

/// Ids must be non-empty and free of commas, quotes and whitespace.
void validate_sample_id(std::string_view id);

void write_traces(std::ostream& out, std::span<const SampleTrace> traces);
std::vector<SampleTrace> read_traces(std::istream& in, std::string_view source);

void write_difficulty_table(std::ostream& out, const DifficultyTable& table);
DifficultyTable read_difficulty_table(std::istream& in, std::string_view source);

struct LabeledSample {
  std::string sample_id;
  std::size_t label = 0;
};
std::vector<LabeledSample> read_labels(std::istream& in, std::string_view source);

struct Prediction {
  std::string sample_id;
  std::size_t truth = 0;
  std::size_t predicted = 0;
};
std::vector<Prediction> read_predictions(std::istream& in, std::string_view source);
void write_predictions(std::ostream& out, std::span<const Prediction> predictions);

void write_distribution_report(std::ostream& out, const ClassDistribution& dist);
ClassDistribution read_distribution_report(std::istream& in, std::string_view source);
std::string distribution_summary(const ClassDistribution& dist);

void write_schedule(std::ostream& out, const Schedule& schedule);
void write_schedule_summary(std::ostream& out, const Schedule& schedule);
void write_schedule_targets(std::ostream& out, const Schedule& schedule);

std::string read_text_file(const std::filesystem::path& path);
/// Writes via a temporary file and rename, so readers never see partial output.
void write_text_file(const std::filesystem::path& path, std::string_view content);

}  // namespace climd
