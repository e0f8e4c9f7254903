#pragma once

// File formats shared by the command-line tools.
//
// SPB1 batch file, all fields little-endian:
//   offset 0   char[4]  magic "SPB1"
//   offset 4   uint16   format version (1)
//   offset 6   uint16   width
//   offset 8   uint16   height
//   offset 10  uint32   image count
//   offset 14  float32  count * width * height pixels, images in index
//                       order, each row-major
//
// Fit CSV:   index,x,y,sigma,alpha,beta,status,iterations,nchi2
// Truth CSV: index,x,y,sigma,alpha,beta
// Reals are written in the shortest form that reads back to the same float.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "spotfit/image.hpp"
#include "spotfit/initializer.hpp"
#include "spotfit/lm_solver.hpp"
#include "spotfit/simulator.hpp"

namespace spotfit::io {

inline constexpr std::uint16_t kSpbVersion = 1;
inline constexpr std::size_t kSpbHeaderBytes = 14;

// Unreadable or unwritable file.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Malformed content; offset is the byte (SPB1) or line (CSV) at fault.
class FormatError : public std::runtime_error {
 public:
  FormatError(const std::string& what, std::size_t offset)
      : std::runtime_error(what), offset_(offset) {}
  std::size_t offset() const noexcept { return offset_; }

 private:
  std::size_t offset_;
};

void write_spb1(std::ostream& out, const ImageBatch& batch);
ImageBatch read_spb1(std::istream& in);
void save_spb1(const std::filesystem::path& path, const ImageBatch& batch);
ImageBatch load_spb1(const std::filesystem::path& path);

std::string format_real(float value);
float parse_real(std::string_view text);

inline constexpr std::string_view kFitCsvHeader = "index,x,y,sigma,alpha,beta,status,iterations,nchi2";
inline constexpr std::string_view kTruthCsvHeader = "index,x,y,sigma,alpha,beta";

void write_fit_csv(std::ostream& out, std::span<const FitResult> results);
std::vector<FitResult> read_fit_csv(std::istream& in);

void write_truth_csv(std::ostream& out, std::span<const TruthRecord> truths);
std::vector<TruthRecord> read_truth_csv(std::istream& in);

// Initial estimates from any CSV with index,x,y,sigma,alpha,beta columns
// (truth or fit files). Rows must cover indices 0..n-1 in order.
std::vector<InitialEstimate> read_inits_csv(std::istream& in);

}  // namespace spotfit::io
