#include "spotfit/io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <map>
#include <ostream>

namespace spotfit::io {

namespace {

template <class T>
void put_le(std::ostream& out, T value) {
  std::array<char, sizeof(T)> bytes{};
  for (std::size_t i = 0; i < sizeof(T); ++i) {
    bytes[i] = static_cast<char>((static_cast<std::uint64_t>(value) >> (8 * i)) & 0xffu);
  }
  out.write(bytes.data(), bytes.size());
}

template <class T>
T get_le(const unsigned char* p) {
  std::uint64_t v = 0;
  for (std::size_t i = 0; i < sizeof(T); ++i) v |= static_cast<std::uint64_t>(p[i]) << (8 * i);
  return static_cast<T>(v);
}

std::vector<std::string_view> split(std::string_view line) {
  std::vector<std::string_view> fields;
  std::size_t start = 0;
  while (true) {
    const auto comma = line.find(',', start);
    fields.push_back(line.substr(start, comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return fields;
}

std::string_view chomp(std::string_view line) {
  while (!line.empty() && (line.back() == '\r' || line.back() == ' ')) line.remove_suffix(1);
  return line;
}

std::size_t parse_index(std::string_view text, std::size_t line) {
  std::size_t v = 0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size()) {
    throw FormatError("line " + std::to_string(line) + ": bad integer '" + std::string(text) + "'", line);
  }
  return v;
}

float parse_field(std::string_view text, std::size_t line) {
  try {
    return parse_real(text);
  } catch (const std::invalid_argument&) {
    throw FormatError("line " + std::to_string(line) + ": bad number '" + std::string(text) + "'", line);
  }
}

// Reads the header and returns the column position of each name.
std::map<std::string, std::size_t, std::less<>> read_header(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("missing CSV header", 1);
  std::map<std::string, std::size_t, std::less<>> columns;
  const auto names = split(chomp(line));
  for (std::size_t i = 0; i < names.size(); ++i) columns.emplace(std::string(names[i]), i);
  return columns;
}

void expect_header(std::istream& in, std::string_view header) {
  std::string line;
  if (!std::getline(in, line) || chomp(line) != header) {
    throw FormatError("expected CSV header '" + std::string(header) + "'", 1);
  }
}

}  // namespace

void write_spb1(std::ostream& out, const ImageBatch& batch) {
  const PixelGrid& grid = batch.grid();
  require_valid(grid);
  out.write("SPB1", 4);
  put_le<std::uint16_t>(out, kSpbVersion);
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(grid.width));
  put_le<std::uint16_t>(out, static_cast<std::uint16_t>(grid.height));
  put_le<std::uint32_t>(out, static_cast<std::uint32_t>(batch.size()));
  for (float v : batch.pixels()) put_le<std::uint32_t>(out, std::bit_cast<std::uint32_t>(v));
  if (!out) throw IoError("failed writing SPB1 stream");
}

ImageBatch read_spb1(std::istream& in) {
  std::array<unsigned char, kSpbHeaderBytes> header{};
  in.read(reinterpret_cast<char*>(header.data()), header.size());
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got < 4 || std::string_view(reinterpret_cast<const char*>(header.data()), 4) != "SPB1") {
    throw FormatError("offset 0: missing SPB1 magic", 0);
  }
  if (got < header.size()) {
    throw FormatError("offset " + std::to_string(got) + ": truncated SPB1 header", got);
  }
  const auto version = get_le<std::uint16_t>(&header[4]);
  if (version != kSpbVersion) {
    throw FormatError("offset 4: unsupported SPB1 version " + std::to_string(version), 4);
  }
  const PixelGrid grid{get_le<std::uint16_t>(&header[6]), get_le<std::uint16_t>(&header[8])};
  if (!grid.valid()) {
    throw FormatError("offset 6: invalid image size " + std::to_string(grid.width) + "x" +
                          std::to_string(grid.height),
                      6);
  }
  const auto count = get_le<std::uint32_t>(&header[10]);
  const std::size_t values = static_cast<std::size_t>(count) * grid.size();

  std::vector<float> pixels(values);
  std::vector<unsigned char> raw(values * 4);
  in.read(reinterpret_cast<char*>(raw.data()), static_cast<std::streamsize>(raw.size()));
  const auto payload = static_cast<std::size_t>(in.gcount());
  if (payload != raw.size()) {
    const std::size_t at = kSpbHeaderBytes + payload;
    throw FormatError("offset " + std::to_string(at) + ": payload truncated, expected " +
                          std::to_string(raw.size()) + " bytes",
                      at);
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    const std::size_t at = kSpbHeaderBytes + raw.size();
    throw FormatError("offset " + std::to_string(at) + ": trailing bytes after payload", at);
  }
  for (std::size_t i = 0; i < values; ++i) {
    pixels[i] = std::bit_cast<float>(get_le<std::uint32_t>(&raw[4 * i]));
  }
  return ImageBatch(grid, std::move(pixels));
}

void save_spb1(const std::filesystem::path& path, const ImageBatch& batch) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  write_spb1(out, batch);
  out.flush();
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

ImageBatch load_spb1(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  return read_spb1(in);
}

std::string format_real(float value) {
  std::array<char, 32> buf{};
  const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), ptr);
}

float parse_real(std::string_view text) {
  float v = 0;
  if (text == "nan") return std::nanf("");
  if (text == "inf") return INFINITY;
  if (text == "-inf") return -INFINITY;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc() || ptr != text.data() + text.size() || text.empty()) {
    throw std::invalid_argument("not a number: '" + std::string(text) + "'");
  }
  return v;
}

void write_fit_csv(std::ostream& out, std::span<const FitResult> results) {
  out << kFitCsvHeader << '\n';
  for (std::size_t i = 0; i < results.size(); ++i) {
    const FitResult& r = results[i];
    out << i << ',' << format_real(r.shape.x_bar) << ',' << format_real(r.shape.y_bar) << ','
        << format_real(r.shape.sigma) << ',' << format_real(r.amps.alpha) << ','
        << format_real(r.amps.beta) << ',' << to_string(r.stop) << ',' << r.iterations_used << ','
        << format_real(r.normalized_chi2) << '\n';
  }
  if (!out) throw IoError("failed writing fit CSV");
}

std::vector<FitResult> read_fit_csv(std::istream& in) {
  expect_header(in, kFitCsvHeader);
  std::vector<FitResult> results;
  std::string line;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    const auto text = chomp(line);
    if (text.empty()) continue;
    const auto f = split(text);
    if (f.size() != 9) throw FormatError("line " + std::to_string(lineno) + ": expected 9 fields", lineno);
    if (parse_index(f[0], lineno) != results.size()) {
      throw FormatError("line " + std::to_string(lineno) + ": rows must be sorted by index", lineno);
    }
    FitResult r;
    r.shape = {parse_field(f[1], lineno), parse_field(f[2], lineno), parse_field(f[3], lineno)};
    r.amps = {parse_field(f[4], lineno), parse_field(f[5], lineno)};
    const auto stop = parse_stop_reason(f[6]);
    if (!stop) throw FormatError("line " + std::to_string(lineno) + ": unknown status", lineno);
    r.stop = *stop;
    r.iterations_used = static_cast<int>(parse_index(f[7], lineno));
    r.normalized_chi2 = parse_field(f[8], lineno);
    results.push_back(r);
  }
  return results;
}

void write_truth_csv(std::ostream& out, std::span<const TruthRecord> truths) {
  out << kTruthCsvHeader << '\n';
  for (const TruthRecord& t : truths) {
    out << t.index << ',' << format_real(t.x) << ',' << format_real(t.y) << ','
        << format_real(t.sigma) << ',' << format_real(t.alpha) << ',' << format_real(t.beta) << '\n';
  }
  if (!out) throw IoError("failed writing truth CSV");
}

std::vector<TruthRecord> read_truth_csv(std::istream& in) {
  expect_header(in, kTruthCsvHeader);
  std::vector<TruthRecord> truths;
  std::string line;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    const auto text = chomp(line);
    if (text.empty()) continue;
    const auto f = split(text);
    if (f.size() != 6) throw FormatError("line " + std::to_string(lineno) + ": expected 6 fields", lineno);
    TruthRecord t;
    t.index = parse_index(f[0], lineno);
    if (!truths.empty() && t.index <= truths.back().index) {
      throw FormatError("line " + std::to_string(lineno) + ": rows must be sorted by index", lineno);
    }
    t.x = parse_field(f[1], lineno);
    t.y = parse_field(f[2], lineno);
    t.sigma = parse_field(f[3], lineno);
    t.alpha = parse_field(f[4], lineno);
    t.beta = parse_field(f[5], lineno);
    truths.push_back(t);
  }
  return truths;
}

std::vector<InitialEstimate> read_inits_csv(std::istream& in) {
  const auto columns = read_header(in);
  std::array<std::size_t, 6> at{};
  constexpr std::array<std::string_view, 6> names = {"index", "x", "y", "sigma", "alpha", "beta"};
  for (std::size_t k = 0; k < names.size(); ++k) {
    const auto it = columns.find(names[k]);
    if (it == columns.end()) {
      throw FormatError("initial-estimate CSV lacks column '" + std::string(names[k]) + "'", 1);
    }
    at[k] = it->second;
  }
  std::vector<InitialEstimate> inits;
  std::string line;
  for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
    const auto text = chomp(line);
    if (text.empty()) continue;
    const auto f = split(text);
    if (f.size() != columns.size()) {
      throw FormatError("line " + std::to_string(lineno) + ": wrong field count", lineno);
    }
    if (parse_index(f[at[0]], lineno) != inits.size()) {
      throw FormatError("line " + std::to_string(lineno) + ": indices must run 0..n-1", lineno);
    }
    InitialEstimate e;
    e.shape = {parse_field(f[at[1]], lineno), parse_field(f[at[2]], lineno),
               parse_field(f[at[3]], lineno)};
    e.amps = {parse_field(f[at[4]], lineno), parse_field(f[at[5]], lineno)};
    inits.push_back(e);
  }
  return inits;
}

}  // namespace spotfit::io
