#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gsi/linalg.hpp"

namespace gsi {

// trials x channels x samples, stored trial-major, channel-major,
// sample-minor (the EPB1 payload order). Units are microvolts.
class EpochSet {
 public:
  using TrialMap = Eigen::Map<RowMatrix>;
  using ConstTrialMap = Eigen::Map<const RowMatrix>;

  EpochSet() = default;
  EpochSet(std::size_t n_trials, std::vector<std::string> channel_names, std::size_t n_samples, double rate);

  std::size_t n_trials() const noexcept { return n_trials_; }
  std::size_t n_channels() const noexcept { return names_.size(); }
  std::size_t n_samples() const noexcept { return n_samples_; }
  double rate() const noexcept { return rate_; }
  const std::vector<std::string>& channel_names() const noexcept { return names_; }
  std::optional<std::size_t> channel_index(const std::string& name) const;

  // Per-trial tags; either empty or one entry per trial.
  const std::vector<std::string>& labels() const noexcept { return labels_; }
  const std::vector<std::string>& subjects() const noexcept { return subjects_; }
  void set_labels(std::vector<std::string> labels);
  void set_subjects(std::vector<std::string> subjects);

  std::span<double> data() noexcept { return data_; }
  std::span<const double> data() const noexcept { return data_; }

  // channels x samples view of one trial.
  TrialMap trial(std::size_t t);
  ConstTrialMap trial(std::size_t t) const;
  std::span<const double> row(std::size_t t, std::size_t ch) const;
  std::span<double> row(std::size_t t, std::size_t ch);

  // channels x (trials * samples): every time sample of every trial as a
  // column, trials concatenated in the given order.
  Matrix pooled(std::span<const std::size_t> trials) const;
  Matrix pooled() const;

  EpochSet select_trials(std::span<const std::size_t> trials) const;
  // Channels by name, in the given order. Throws invalid_input on unknown names.
  EpochSet select_channels(std::span<const std::string> names) const;

  friend bool operator==(const EpochSet& a, const EpochSet& b);

 private:
  std::size_t n_trials_ = 0;
  std::size_t n_samples_ = 0;
  double rate_ = 0.0;
  std::vector<std::string> names_;
  std::vector<std::string> labels_;
  std::vector<std::string> subjects_;
  std::vector<double> data_;
};

// EPB1 container:
//   "EPB1", u32 n_trials, u32 n_channels, u32 n_samples, f32 rate,
//   u32 name-block length, name block (UTF-8 JSON), f32 payload,
// all little-endian. The name block is a JSON array of channel names, or an
// object {"channels":[...], "labels":[...], "subjects":[...]} when per-trial
// tags are present.
std::string encode_epb1(const EpochSet& epochs);
EpochSet decode_epb1(std::span<const unsigned char> bytes);
EpochSet load_epb1(const std::filesystem::path& path);
void save_epb1(const std::filesystem::path& path, const EpochSet& epochs);

}  // namespace gsi
