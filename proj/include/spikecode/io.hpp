#pragma once

#include <filesystem>
#include <iosfwd>
#include <json.hpp>
#include <string>
#include <vector>

#include "spikecode/adm.hpp"
#include "spikecode/decoder.hpp"
#include "spikecode/encoder.hpp"
#include "spikecode/network.hpp"
#include "spikecode/signals.hpp"

namespace spikecode {

using Json = nlohmann::ordered_json;

Json to_json(const NetworkConfig& config);
NetworkConfig network_from_json(const Json& j);

Json to_json(const TrainedDecoder& decoder);
TrainedDecoder decoder_from_json(const Json& j);

Json to_json(const Encoding& encoding);
Encoding encoding_from_json(const Json& j);

Json to_json(const TimeGrid& grid);
TimeGrid grid_from_json(const Json& j);

void write_json(const std::filesystem::path& path, const Json& j);
Json read_json(const std::filesystem::path& path);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double v);

/// Spike stream as `time_s,channel` rows (channel UP or DN), time-sorted.
void write_stream_csv(std::ostream& os, const SpikeStream& stream);
void write_stream_csv(const std::filesystem::path& path, const SpikeStream& stream);
SpikeStream read_stream_csv(const std::filesystem::path& path);

/// Long-format result row.
struct MetricRow {
  std::string run;
  std::uint64_t seed = 0;
  std::string metric;
  double value = 0.0;
};

void write_metrics_csv(const std::filesystem::path& path, const std::vector<MetricRow>& rows);

/// Plain CSV table; cells are written verbatim.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<std::string>>& rows);
std::vector<std::vector<std::string>> read_csv(const std::filesystem::path& path, bool skip_header = true);

/// Stimulus dataset on disk: metadata.json, params.csv, waveforms.csv (one
/// stimulus per row).
struct WaveformDataset {
  SignalFamily family = SignalFamily::Sinusoidal;
  Preset preset = Preset::Sim;
  TimeGrid grid;
  std::uint64_t seed = 0;
  std::vector<ParamVector> params;
  std::vector<Waveform> waveforms;
};

void write_dataset(const std::filesystem::path& dir, const WaveformDataset& data);
WaveformDataset read_dataset(const std::filesystem::path& dir);

}  // namespace spikecode
