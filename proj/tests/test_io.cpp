#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <random>
#include <sstream>

#include "spotfit/io.hpp"

namespace spotfit::io {
namespace {

std::string to_bytes(const ImageBatch& batch) {
  std::ostringstream out(std::ios::binary);
  write_spb1(out, batch);
  return out.str();
}

ImageBatch from_bytes(const std::string& bytes) {
  std::istringstream in(bytes, std::ios::binary);
  return read_spb1(in);
}

std::size_t failure_offset(const std::string& bytes) {
  try {
    from_bytes(bytes);
  } catch (const FormatError& e) {
    return e.offset();
  }
  ADD_FAILURE() << "no FormatError";
  return 0;
}

ImageBatch sample_batch() {
  ImageBatch batch(PixelGrid{3, 2}, std::size_t{2});
  const float v[] = {0.0f, -1.5f, 1e-30f, 3.25f, 1e30f, 7.0f};
  for (std::size_t i = 0; i < 6; ++i) {
    batch.mutable_image(0)[i] = v[i];
    batch.mutable_image(1)[i] = v[i] * 2 + 1;
  }
  return batch;
}

TEST(Spb1, HeaderLayout) {
  const std::string bytes = to_bytes(sample_batch());
  ASSERT_EQ(bytes.size(), kSpbHeaderBytes + 2 * 6 * 4);
  EXPECT_EQ(bytes.substr(0, 4), "SPB1");
  const auto u8 = [&](std::size_t i) { return static_cast<unsigned char>(bytes[i]); };
  EXPECT_EQ(u8(4) | u8(5) << 8, 1);
  EXPECT_EQ(u8(6) | u8(7) << 8, 3);
  EXPECT_EQ(u8(8) | u8(9) << 8, 2);
  EXPECT_EQ(u8(10) | u8(11) << 8 | u8(12) << 16 | u8(13) << 24, 2);
  // 3.25f = 0x40500000, little-endian
  EXPECT_EQ(u8(14 + 12), 0x00);
  EXPECT_EQ(u8(14 + 14), 0x50);
  EXPECT_EQ(u8(14 + 15), 0x40);
}

TEST(Spb1, RoundTrip) {
  const ImageBatch batch = sample_batch();
  const ImageBatch back = from_bytes(to_bytes(batch));
  EXPECT_EQ(back.grid(), batch.grid());
  EXPECT_EQ(back.size(), 2u);
  EXPECT_EQ(std::memcmp(back.pixels().data(), batch.pixels().data(), 12 * sizeof(float)), 0);
}

TEST(Spb1, EmptyBatch) {
  const ImageBatch empty(PixelGrid{9, 9}, std::size_t{0});
  const std::string bytes = to_bytes(empty);
  EXPECT_EQ(bytes.size(), kSpbHeaderBytes);
  const ImageBatch back = from_bytes(bytes);
  EXPECT_TRUE(back.empty());
  EXPECT_EQ(back.grid(), (PixelGrid{9, 9}));
}

TEST(Spb1, MalformedInputsReportOffsets) {
  const std::string good = to_bytes(sample_batch());
  EXPECT_EQ(failure_offset(""), 0u);
  EXPECT_EQ(failure_offset("SPB2" + good.substr(4)), 0u);
  EXPECT_EQ(failure_offset(good.substr(0, 9)), 9u);
  std::string bad_version = good;
  bad_version[4] = 2;
  EXPECT_EQ(failure_offset(bad_version), 4u);
  std::string bad_size = good;
  bad_size[6] = 0;
  EXPECT_EQ(failure_offset(bad_size), 6u);
  EXPECT_EQ(failure_offset(good.substr(0, good.size() - 3)), good.size() - 3);
  EXPECT_EQ(failure_offset(good + "x"), good.size());
}

TEST(Spb1, MissingFileIsIoError) {
  EXPECT_THROW(load_spb1("/nonexistent/dir/file.spb"), IoError);
  EXPECT_THROW(save_spb1("/nonexistent/dir/file.spb", sample_batch()), IoError);
}

TEST(Reals, ShortestRoundTrip) {
  std::mt19937 rng(1);
  for (int i = 0; i < 10000; ++i) {
    const float v = std::bit_cast<float>(static_cast<std::uint32_t>(rng()));
    if (!std::isfinite(v)) continue;
    EXPECT_EQ(parse_real(format_real(v)), v);
  }
  EXPECT_EQ(format_real(0.1f), "0.1");
  EXPECT_TRUE(std::isnan(parse_real(format_real(std::numeric_limits<float>::quiet_NaN()))));
  EXPECT_THROW(parse_real("1.5x"), std::invalid_argument);
  EXPECT_THROW(parse_real(""), std::invalid_argument);
}

TEST(FitCsv, RoundTripAllFields) {
  std::vector<FitResult> fits(kStopReasons.size());
  for (std::size_t i = 0; i < fits.size(); ++i) {
    fits[i].shape = {4.1f + i, 3.9f, 1.37f};
    fits[i].amps = {28.3f, 0.4938f};
    fits[i].stop = kStopReasons[i];
    fits[i].iterations_used = static_cast<int>(i * 3);
    fits[i].normalized_chi2 = 1.0f / 3.0f;
  }
  std::stringstream buf;
  write_fit_csv(buf, fits);
  EXPECT_EQ(buf.str().substr(0, kFitCsvHeader.size()), kFitCsvHeader);
  const auto back = read_fit_csv(buf);
  ASSERT_EQ(back.size(), fits.size());
  for (std::size_t i = 0; i < fits.size(); ++i) {
    EXPECT_EQ(back[i].shape, fits[i].shape);
    EXPECT_EQ(back[i].amps, fits[i].amps);
    EXPECT_EQ(back[i].stop, fits[i].stop);
    EXPECT_EQ(back[i].iterations_used, fits[i].iterations_used);
    EXPECT_EQ(back[i].normalized_chi2, fits[i].normalized_chi2);
  }
}

TEST(FitCsv, HeaderOnly) {
  std::stringstream buf;
  write_fit_csv(buf, {});
  EXPECT_EQ(buf.str(), std::string(kFitCsvHeader) + "\n");
  EXPECT_TRUE(read_fit_csv(buf).empty());
}

TEST(FitCsv, MalformedRowsReportLine) {
  const std::string header = std::string(kFitCsvHeader) + "\n";
  const auto line_of = [](const std::string& text) -> std::size_t {
    std::istringstream in(text);
    try {
      read_fit_csv(in);
    } catch (const FormatError& e) {
      return e.offset();
    }
    return 0;
  };
  EXPECT_EQ(line_of("index,x\n"), 1u);
  EXPECT_EQ(line_of(header + "0,1,2,3,4,5,MinDelta,4,1\n1,1,2,3\n"), 3u);
  EXPECT_EQ(line_of(header + "0,1,2,3,4,5,Bogus,4,1\n"), 2u);
  EXPECT_EQ(line_of(header + "0,1,2,abc,4,5,MinDelta,4,1\n"), 2u);
  EXPECT_EQ(line_of(header + "1,1,2,3,4,5,MinDelta,4,1\n"), 2u);
}

TEST(TruthCsv, RoundTrip) {
  std::vector<TruthRecord> truths{{0, 4.1f, 3.8f, 1.2f, 44.2f, 0.49f}, {1, 4.0f, 4.0f, 2.0f, 15.9f, 0.49f}};
  std::stringstream buf;
  write_truth_csv(buf, truths);
  EXPECT_EQ(read_truth_csv(buf), truths);
}

TEST(InitsCsv, ReadsTruthAndFitFiles) {
  std::vector<TruthRecord> truths{{0, 4.1f, 3.8f, 1.2f, 44.2f, 0.49f}};
  std::stringstream t;
  write_truth_csv(t, truths);
  const auto a = read_inits_csv(t);
  ASSERT_EQ(a.size(), 1u);
  EXPECT_EQ(a[0].shape, (ShapeParams{4.1f, 3.8f, 1.2f}));
  EXPECT_EQ(a[0].amps, (Amplitudes{44.2f, 0.49f}));

  std::istringstream reordered("sigma,beta,alpha,status,y,x,index\n1.5,2,30,MinDelta,3,4,0\n");
  const auto b = read_inits_csv(reordered);
  ASSERT_EQ(b.size(), 1u);
  EXPECT_EQ(b[0].shape, (ShapeParams{4.0f, 3.0f, 1.5f}));
  EXPECT_EQ(b[0].amps, (Amplitudes{30.0f, 2.0f}));

  std::istringstream missing("index,x,y,alpha,beta\n0,1,2,3,4\n");
  EXPECT_THROW(read_inits_csv(missing), FormatError);
}

}  // namespace
}  // namespace spotfit::io
