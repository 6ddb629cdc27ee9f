#pragma once

// Static CSV and SVG artifacts. Output depends only on the arguments.

#include <cstddef>
#include <ostream>
#include <span>
#include <string>

#include "qsaf/extrema_levels.hpp"
#include "qsaf/self_affine.hpp"

namespace qsaf {

struct Metadata {
  std::string label;
  std::string command;
};

void write_samples_csv(std::ostream& os, std::span<const SamplePoint> samples,
                       const Metadata& meta);

// Polyline of the samples with y ticks at 0, m, 1, M and x ticks at 0, 1.
void write_samples_svg(std::ostream& os, std::span<const SamplePoint> samples,
                       const BoundsPair& bounds, const Metadata& meta);

// Stage-by-stage writers so large constructions never sit in memory at once.
class CantorWriter {
 public:
  virtual ~CantorWriter() = default;
  virtual void begin(const CantorSpec& spec, std::size_t steps, const Metadata& meta) = 0;
  virtual void stage_begin(std::size_t t) = 0;
  virtual void interval(const Interval& iv) = 0;
  virtual void stage_end() = 0;
  virtual void end() = 0;
};

// Rows "stage,left,right".
class CantorCsvWriter final : public CantorWriter {
 public:
  explicit CantorCsvWriter(std::ostream& os) : os_(os) {}
  void begin(const CantorSpec& spec, std::size_t steps, const Metadata& meta) override;
  void stage_begin(std::size_t t) override { stage_ = t; }
  void interval(const Interval& iv) override;
  void stage_end() override {}
  void end() override {}

 private:
  std::ostream& os_;
  std::size_t stage_ = 0;
};

// One horizontal band per stage, stacked top to bottom.
class CantorSvgWriter final : public CantorWriter {
 public:
  explicit CantorSvgWriter(std::ostream& os) : os_(os) {}
  void begin(const CantorSpec& spec, std::size_t steps, const Metadata& meta) override;
  void stage_begin(std::size_t t) override;
  void interval(const Interval& iv) override;
  void stage_end() override;
  void end() override;

 private:
  std::ostream& os_;
  double band_top_ = 0.0;
};

std::string xml_escape(const std::string& text);

}  // namespace qsaf
