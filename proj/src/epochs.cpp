#include "gsi/epochs.hpp"

#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <unordered_set>

#include "json.hpp"

#include "gsi/error.hpp"

namespace gsi {

EpochSet::EpochSet(std::size_t n_trials, std::vector<std::string> channel_names, std::size_t n_samples, double rate)
    : n_trials_(n_trials), n_samples_(n_samples), rate_(rate), names_(std::move(channel_names)) {
  if (!(rate_ > 0.0) || !std::isfinite(rate_)) throw invalid_input("epochs: sampling rate must be positive");
  std::unordered_set<std::string> seen;
  for (const std::string& n : names_) {
    if (n.empty()) throw invalid_input("epochs: empty channel name");
    if (!seen.insert(n).second) throw invalid_input("epochs: duplicate channel name '" + n + "'");
  }
  data_.assign(n_trials_ * names_.size() * n_samples_, 0.0);
}

std::optional<std::size_t> EpochSet::channel_index(const std::string& name) const {
  for (std::size_t i = 0; i < names_.size(); ++i)
    if (names_[i] == name) return i;
  return std::nullopt;
}

void EpochSet::set_labels(std::vector<std::string> labels) {
  if (!labels.empty() && labels.size() != n_trials_) throw invalid_input("epochs: label count does not match trials");
  labels_ = std::move(labels);
}

void EpochSet::set_subjects(std::vector<std::string> subjects) {
  if (!subjects.empty() && subjects.size() != n_trials_) throw invalid_input("epochs: subject count does not match trials");
  subjects_ = std::move(subjects);
}

EpochSet::TrialMap EpochSet::trial(std::size_t t) {
  return TrialMap(data_.data() + t * names_.size() * n_samples_, names_.size(), n_samples_);
}

EpochSet::ConstTrialMap EpochSet::trial(std::size_t t) const {
  return ConstTrialMap(data_.data() + t * names_.size() * n_samples_, names_.size(), n_samples_);
}

std::span<const double> EpochSet::row(std::size_t t, std::size_t ch) const {
  return {data_.data() + (t * names_.size() + ch) * n_samples_, n_samples_};
}

std::span<double> EpochSet::row(std::size_t t, std::size_t ch) {
  return {data_.data() + (t * names_.size() + ch) * n_samples_, n_samples_};
}

Matrix EpochSet::pooled(std::span<const std::size_t> trials) const {
  const auto ns = static_cast<Eigen::Index>(n_samples_);
  Matrix out(names_.size(), static_cast<Eigen::Index>(trials.size()) * ns);
  for (std::size_t k = 0; k < trials.size(); ++k) {
    if (trials[k] >= n_trials_) throw invalid_input("epochs: trial index out of range");
    out.middleCols(static_cast<Eigen::Index>(k) * ns, ns) = trial(trials[k]);
  }
  return out;
}

Matrix EpochSet::pooled() const {
  std::vector<std::size_t> all(n_trials_);
  for (std::size_t i = 0; i < n_trials_; ++i) all[i] = i;
  return pooled(all);
}

EpochSet EpochSet::select_trials(std::span<const std::size_t> trials) const {
  EpochSet out(trials.size(), names_, n_samples_, rate_);
  const std::size_t block = names_.size() * n_samples_;
  std::vector<std::string> labels, subjects;
  for (std::size_t k = 0; k < trials.size(); ++k) {
    if (trials[k] >= n_trials_) throw invalid_input("epochs: trial index out of range");
    std::copy_n(data_.begin() + static_cast<std::ptrdiff_t>(trials[k] * block), block,
                out.data_.begin() + static_cast<std::ptrdiff_t>(k * block));
    if (!labels_.empty()) labels.push_back(labels_[trials[k]]);
    if (!subjects_.empty()) subjects.push_back(subjects_[trials[k]]);
  }
  out.labels_ = std::move(labels);
  out.subjects_ = std::move(subjects);
  return out;
}

EpochSet EpochSet::select_channels(std::span<const std::string> names) const {
  std::vector<std::size_t> idx;
  idx.reserve(names.size());
  for (const std::string& n : names) {
    const auto i = channel_index(n);
    if (!i) throw invalid_input("epochs: unknown channel '" + n + "'");
    idx.push_back(*i);
  }
  EpochSet out(n_trials_, {names.begin(), names.end()}, n_samples_, rate_);
  out.labels_ = labels_;
  out.subjects_ = subjects_;
  for (std::size_t t = 0; t < n_trials_; ++t) {
    for (std::size_t k = 0; k < idx.size(); ++k) {
      const auto src = row(t, idx[k]);
      std::copy(src.begin(), src.end(), out.row(t, k).begin());
    }
  }
  return out;
}

bool operator==(const EpochSet& a, const EpochSet& b) {
  return a.n_trials_ == b.n_trials_ && a.n_samples_ == b.n_samples_ && a.rate_ == b.rate_ && a.names_ == b.names_ &&
         a.labels_ == b.labels_ && a.subjects_ == b.subjects_ && a.data_ == b.data_;
}

namespace {

void put_u32(std::string& out, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) out.push_back(static_cast<char>((v >> (8 * k)) & 0xFFu));
}

void put_f32(std::string& out, float f) { put_u32(out, std::bit_cast<std::uint32_t>(f)); }

class Reader {
 public:
  explicit Reader(std::span<const unsigned char> bytes) : bytes_(bytes) {}

  std::uint32_t u32() {
    need(4);
    std::uint32_t v = 0;
    for (int k = 0; k < 4; ++k) v |= static_cast<std::uint32_t>(bytes_[pos_ + k]) << (8 * k);
    pos_ += 4;
    return v;
  }
  float f32() { return std::bit_cast<float>(u32()); }
  std::string_view text(std::size_t len) {
    need(len);
    std::string_view s(reinterpret_cast<const char*>(bytes_.data() + pos_), len);
    pos_ += len;
    return s;
  }
  std::size_t remaining() const { return bytes_.size() - pos_; }
  void need(std::size_t n) const {
    if (bytes_.size() - pos_ < n) throw format_error("EPB1: truncated file");
  }

 private:
  std::span<const unsigned char> bytes_;
  std::size_t pos_ = 0;
};

std::uint32_t checked_u32(std::size_t v, const char* what) {
  if (v > 0xFFFFFFFFu) throw invalid_input(std::string("EPB1: ") + what + " does not fit in u32");
  return static_cast<std::uint32_t>(v);
}

}  // namespace

std::string encode_epb1(const EpochSet& epochs) {
  using nlohmann::json;
  std::string names;
  if (epochs.labels().empty() && epochs.subjects().empty()) {
    names = json(epochs.channel_names()).dump();
  } else {
    json doc{{"channels", epochs.channel_names()}};
    if (!epochs.labels().empty()) doc["labels"] = epochs.labels();
    if (!epochs.subjects().empty()) doc["subjects"] = epochs.subjects();
    names = doc.dump();
  }
  std::string out;
  out.reserve(24 + names.size() + epochs.data().size() * 4);
  out += "EPB1";
  put_u32(out, checked_u32(epochs.n_trials(), "trial count"));
  put_u32(out, checked_u32(epochs.n_channels(), "channel count"));
  put_u32(out, checked_u32(epochs.n_samples(), "sample count"));
  put_f32(out, static_cast<float>(epochs.rate()));
  put_u32(out, checked_u32(names.size(), "name block"));
  out += names;
  for (double v : epochs.data()) put_f32(out, static_cast<float>(v));
  return out;
}

EpochSet decode_epb1(std::span<const unsigned char> bytes) {
  using nlohmann::json;
  Reader in(bytes);
  if (in.text(4) != "EPB1") throw format_error("EPB1: bad magic");
  const std::uint32_t n_trials = in.u32();
  const std::uint32_t n_channels = in.u32();
  const std::uint32_t n_samples = in.u32();
  const float rate = in.f32();
  const std::uint32_t name_len = in.u32();
  const std::string_view name_block = in.text(name_len);

  json doc;
  try {
    doc = json::parse(name_block.begin(), name_block.end());
  } catch (const json::parse_error& e) {
    throw format_error(std::string("EPB1: invalid name block: ") + e.what());
  }
  std::vector<std::string> names, labels, subjects;
  try {
    if (doc.is_array()) {
      names = doc.get<std::vector<std::string>>();
    } else if (doc.is_object() && doc.contains("channels")) {
      names = doc["channels"].get<std::vector<std::string>>();
      if (doc.contains("labels")) labels = doc["labels"].get<std::vector<std::string>>();
      if (doc.contains("subjects")) subjects = doc["subjects"].get<std::vector<std::string>>();
    } else {
      throw format_error("EPB1: name block must be an array or an object with \"channels\"");
    }
  } catch (const json::exception& e) {
    throw format_error(std::string("EPB1: invalid name block: ") + e.what());
  }
  if (names.size() != n_channels) throw format_error("EPB1: name block lists " + std::to_string(names.size()) +
                                                     " channels, header says " + std::to_string(n_channels));

  const std::uint64_t count = std::uint64_t{n_trials} * n_channels * n_samples;
  if (in.remaining() != count * 4) {
    if (in.remaining() < count * 4) throw format_error("EPB1: truncated payload");
    throw format_error("EPB1: trailing bytes after payload");
  }
  EpochSet out;
  try {
    out = EpochSet(n_trials, std::move(names), n_samples, rate);
    out.set_labels(std::move(labels));
    out.set_subjects(std::move(subjects));
  } catch (const invalid_input& e) {
    throw format_error(std::string("EPB1: ") + e.what());
  }
  for (double& v : out.data()) v = in.f32();
  return out;
}

EpochSet load_epb1(const std::filesystem::path& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw format_error("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(f)), std::istreambuf_iterator<char>());
  return decode_epb1(bytes);
}

void save_epb1(const std::filesystem::path& path, const EpochSet& epochs) {
  const std::string bytes = encode_epb1(epochs);
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw format_error("cannot write '" + path.string() + "'");
  f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!f) throw format_error("write failed for '" + path.string() + "'");
}

}  // namespace gsi
