#pragma once

#include <string>
#include <utility>
#include <vector>

#include "ionheat/bath.hpp"
#include "ionheat/thermometry.hpp"

namespace ionheat {

/// CSV with a leading `# key: value` metadata block. All numeric cells are
/// written with round-trippable precision so re-runs are byte-comparable.
struct CsvTable {
    std::vector<std::pair<std::string, std::string>> metadata;  // emitted in order
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Shortest representation that parses back to the same double.
std::string format_double(double v);

void write_csv(const std::string& path, const CsvTable& table);
CsvTable read_csv(const std::string& path);

/// Look up a metadata key; empty string when absent.
std::string csv_metadata(const CsvTable& table, const std::string& key);

// Dataset schemas shared between the CLI and the synthetic pipeline. One
// file per observable.

/// Level-population measurements: time_s,level,counts,shots. Analytic points
/// (exact probabilities) are written with shots = 0 and counts = probability.
void write_population_csv(const std::string& path, const PopulationDataset& data,
                          std::vector<std::pair<std::string, std::string>> metadata = {});
PopulationDataset read_population_csv(const std::string& path);

/// Rabi-flop record: time_s,counts,shots. The transition kind travels in the
/// metadata block.
void write_flop_csv(const std::string& path, const FlopDataset& data,
                    std::vector<std::pair<std::string, std::string>> metadata = {});
FlopDataset read_flop_csv(const std::string& path);

/// Per-level estimates: level,p,p_lo,p_hi.
void write_levels_csv(const std::string& path, const PopulationEstimate& estimate,
                      std::vector<std::pair<std::string, std::string>> metadata = {});
std::vector<LevelObservation> read_levels_csv(const std::string& path);

}  // namespace ionheat
