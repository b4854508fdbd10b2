/*
 * Copyright 2026 The scsim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

namespace scsim::cli {

/// Shortest round-trip-safe text for a double; fixed across runs.
std::string fmt(double v);

/// CSV with a leading "# ..." provenance line.
class CsvWriter {
public:
    CsvWriter(const std::filesystem::path& path, const std::string& comment,
              const std::vector<std::string>& columns);

    CsvWriter& cell(const std::string& v);
    CsvWriter& cell(double v);
    CsvWriter& cell(long long v);
    CsvWriter& cell(unsigned long long v);
    CsvWriter& cell(int v) { return cell(static_cast<long long>(v)); }
    CsvWriter& cell(unsigned v) { return cell(static_cast<unsigned long long>(v)); }
    CsvWriter& cell(unsigned long v) { return cell(static_cast<unsigned long long>(v)); }
    void end_row();

private:
    std::ofstream out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
};

struct Series {
    std::string label;
    std::vector<double> x;
    std::vector<double> y;
    bool markers = true;
    bool dashed = false;
};

struct Panel {
    std::string title;
    std::string x_label;
    std::string y_label;
    std::vector<Series> series;
    bool log_x = false;
};

/// Small-multiples line plot, panels laid out @p columns per row.
void write_svg(const std::filesystem::path& path, const std::vector<Panel>& panels, int columns = 3);

struct BarGroup {
    std::string label;
    std::vector<double> values;  // one per series
};

/// Grouped bar chart; values are normalized to the chart maximum.
void write_bar_svg(const std::filesystem::path& path, const std::string& title,
                   const std::vector<std::string>& series, const std::vector<BarGroup>& groups);

}  // namespace scsim::cli
