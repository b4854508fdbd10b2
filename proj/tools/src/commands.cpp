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

#include "scsim_cli/commands.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>
#include <stdexcept>

#include <nlohmann/json.hpp>

#include "scsim/accel.hpp"
#include "scsim/counter.hpp"
#include "scsim_cli/report.hpp"

namespace scsim::cli {

std::string seed_hex(std::uint64_t seed) {
    char buf[24];
    std::snprintf(buf, sizeof buf, "0x%llX", static_cast<unsigned long long>(seed));
    return buf;
}

namespace {

std::uint64_t parse_seed(const nlohmann::json& j) {
    if (j.is_number_unsigned()) return j.get<std::uint64_t>();
    if (j.is_string()) return std::stoull(j.get<std::string>(), nullptr, 0);
    throw std::invalid_argument("seed must be an integer or a hex string");
}

SourceKind parse_source(const std::string& s) {
    if (s == "ideal") return SourceKind::Ideal;
    if (s == "lfsr") return SourceKind::Lfsr;
    throw std::invalid_argument("source must be 'ideal' or 'lfsr', got '" + s + "'");
}

std::filesystem::path out_file(const RunConfig& c, const std::string& name) {
    std::filesystem::create_directories(c.out_dir);
    return c.out_dir / name;
}

std::string header(const std::string& command, const RunConfig& c) {
    return "scsim " + command + " seed=" + seed_hex(c.seed);
}

void check_n_range(const RunConfig& c, std::ostream& log) {
    if (c.n_min < 1 || c.n_max > kMaxPrecision || c.n_min > c.n_max) {
        throw std::invalid_argument("N range must satisfy 1 <= n-min <= n-max <= 16");
    }
    if (c.n_min < 3 || c.n_max > 10) {
        log << "warning: N range " << c.n_min << ".." << c.n_max << " is outside 3..10\n";
    }
}

}  // namespace

void apply_config_json(RunConfig& c, const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config " + path.string());
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
    if (!j.is_object()) throw std::runtime_error(path.string() + ": config must be a JSON object");
    try {
        for (const auto& [key, v] : j.items()) {
            if (key == "seed") c.seed = parse_seed(v);
            else if (key == "out_dir") c.out_dir = v.get<std::string>();
            else if (key == "n_min") c.n_min = v.get<unsigned>();
            else if (key == "n_max") c.n_max = v.get<unsigned>();
            else if (key == "apc_inputs") c.apc_inputs = v.get<std::size_t>();
            else if (key == "apc_samples") c.apc_samples = v.get<std::size_t>();
            else if (key == "model") c.model = v.get<std::string>();
            else if (key == "images") c.images = v.get<std::string>();
            else if (key == "labels") c.labels = v.get<std::string>();
            else if (key == "csv") c.csv = v.get<std::string>();
            else if (key == "limit") c.limit = v.get<std::size_t>();
            else if (key == "k_values") c.k_values = v.get<std::vector<std::size_t>>();
            else if (key == "n_bits_values") c.n_bits_values = v.get<std::vector<unsigned>>();
            else if (key == "repeats") c.repeats = v.get<std::size_t>();
            else if (key == "pcc") c.pcc = parse_pcc_kind(v.get<std::string>());
            else if (key == "source") c.source = parse_source(v.get<std::string>());
            else if (key == "ch_min") c.ch_min = v.get<std::size_t>();
            else if (key == "ch_max") c.ch_max = v.get<std::size_t>();
            else if (key == "profiles") {
                c.profiles.clear();
                for (const auto& p : v) c.profiles.emplace_back(p.get<std::string>());
            } else if (key == "bandwidth") c.bandwidth = v.get<double>();
            else if (key == "arch_k") c.arch_k = v.get<std::size_t>();
            else if (key == "arch_n_bits") c.arch_n_bits = v.get<unsigned>();
            else throw std::invalid_argument("unknown config key '" + key + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

// ---------------------------------------------------------------------------

int cmd_verify_lemma1(const RunConfig& c, std::ostream& log) {
    check_n_range(c, log);
    CsvWriter csv(out_file(c, "lemma1.csv"), header("verify-lemma1", c),
                  {"N", "X", "enumerated", "recurrence", "closed_form", "mux_chain", "offset", "pass"});
    std::size_t failures = 0;
    for (unsigned n = c.n_min; n <= c.n_max; ++n) {
        const std::uint32_t full = (std::uint32_t{1} << n) - 1;
        const std::uint32_t mask = c.corrupt_mask ? (*c.corrupt_mask & full) : inverter_mask(n);
        const std::uint32_t good = inverter_mask(n);
        const double scale = std::ldexp(1.0, -static_cast<int>(n));
        std::size_t bad = 0;
        for (std::uint32_t x = 0; x <= full; ++x) {
            const std::uint64_t ones = enumerate_nandnor_ones(x, n, mask);
            const std::int64_t want = nandnor_expected_scaled(x, n, good);
            const double rec = nandnor_expected(x, n);
            const double closed = nandnor_closed_form(x, n);
            const bool pass = static_cast<std::int64_t>(ones) == want && std::abs(closed - rec) <= 1e-12;
            bad += pass ? 0 : 1;
            csv.cell(n).cell(x).cell(static_cast<double>(ones) * scale).cell(rec).cell(closed)
                .cell(mux_chain_probability(x, n)).cell(rec - mux_chain_probability(x, n))
                .cell(pass ? 1 : 0);
            csv.end_row();
        }
        log << "N=" << n << ": " << (full + 1 - bad) << "/" << (full + 1) << " X values match, offset "
            << fmt(nandnor_constant(n)) << '\n';
        failures += bad;
    }
    return failures == 0 ? kExitOk : kExitVerifyFailed;
}

int cmd_pcc_curves(const RunConfig& c, std::ostream& log) {
    check_n_range(c, log);
    CsvWriter csv(out_file(c, "pcc_curves.csv"), header("pcc-curves", c), {"N", "pcc_kind", "X", "expected_value"});
    std::vector<Panel> panels;
    for (unsigned n = c.n_min; n <= c.n_max; ++n) {
        Panel panel{"N = " + std::to_string(n), "X", "P(out = 1)", {}, false};
        for (PccKind kind : {PccKind::NandNorChain, PccKind::MuxChain, PccKind::Comparator}) {
            Series s{std::string(to_string(kind)), {}, {}, true, kind == PccKind::Comparator};
            for (const CurvePoint& p : conversion_curve({kind, n})) {
                csv.cell(n).cell(std::string(to_string(kind))).cell(p.x).cell(p.expected);
                csv.end_row();
                s.x.push_back(p.x);
                s.y.push_back(p.expected);
            }
            panel.series.push_back(std::move(s));
        }
        panels.push_back(std::move(panel));
    }
    write_svg(out_file(c, "pcc_curves.svg"), panels);
    log << "wrote conversion curves for N=" << c.n_min << ".." << c.n_max << '\n';
    return kExitOk;
}

namespace {

/// Checks 64 input vectors at once; lane l of inputs[i] is input i of vector l.
std::size_t check_lanes(const ApcTree& tree, std::span<const std::uint64_t> inputs, std::uint64_t lane_mask) {
    std::uint64_t planes[64];
    tree.count_lanes(inputs, std::span(planes, tree.output_width()));
    std::size_t bad = 0;
    for (unsigned l = 0; l < 64; ++l) {
        if (((lane_mask >> l) & 1U) == 0) continue;
        unsigned got = 0;
        unsigned want = 0;
        for (unsigned j = 0; j < tree.output_width(); ++j) got |= static_cast<unsigned>((planes[j] >> l) & 1U) << j;
        for (std::uint64_t w : inputs) want += static_cast<unsigned>((w >> l) & 1U);
        bad += got == want ? 0 : 1;
    }
    return bad;
}

}  // namespace

int cmd_apc_check(const RunConfig& c, std::ostream& log) {
    if (c.apc_inputs == 0 || c.apc_inputs > 1024) throw std::invalid_argument("apc inputs must be 1..1024");
    ApcTree tree(c.apc_inputs);
    if (c.fault_cell) tree = tree.with_fault(*c.fault_cell);
    const std::size_t n = c.apc_inputs;
    std::vector<std::uint64_t> lanes(n);
    std::size_t vectors = 0;
    std::size_t bad = 0;
    const bool exhaustive = n <= 16;

    if (exhaustive) {
        const std::uint64_t total = std::uint64_t{1} << n;
        for (std::uint64_t base = 0; base < total; base += 64) {
            const std::uint64_t count = std::min<std::uint64_t>(64, total - base);
            std::fill(lanes.begin(), lanes.end(), 0);
            for (std::uint64_t l = 0; l < count; ++l) {
                for (std::size_t i = 0; i < n; ++i) lanes[i] |= (((base + l) >> i) & 1U) << l;
            }
            bad += check_lanes(tree, lanes, count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1);
            vectors += count;
        }
    } else {
        // Corner cases: empty, full, every single one and every single zero.
        std::vector<std::vector<std::uint8_t>> corners{std::vector<std::uint8_t>(n, 0),
                                                       std::vector<std::uint8_t>(n, 1)};
        for (std::size_t i = 0; i < n; ++i) {
            corners.emplace_back(n, 0)[i] = 1;
            corners.emplace_back(n, 1)[i] = 0;
        }
        for (std::size_t b = 0; b < corners.size(); b += 64) {
            const std::size_t count = std::min<std::size_t>(64, corners.size() - b);
            std::fill(lanes.begin(), lanes.end(), 0);
            for (std::size_t l = 0; l < count; ++l) {
                for (std::size_t i = 0; i < n; ++i) lanes[i] |= std::uint64_t{corners[b + l][i]} << l;
            }
            bad += check_lanes(tree, lanes, count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1);
            vectors += count;
        }
        IdealSource rng(c.seed);
        for (std::size_t done = 0; done < c.apc_samples; done += 64) {
            for (auto& w : lanes) w = (std::uint64_t{rng.step()} << 32) | rng.step();
            const std::size_t count = std::min<std::size_t>(64, c.apc_samples - done);
            bad += check_lanes(tree, lanes, count == 64 ? ~std::uint64_t{0} : (std::uint64_t{1} << count) - 1);
            vectors += count;
        }
    }

    CsvWriter csv(out_file(c, "apc_check.csv"), header("apc-check", c),
                  {"n_inputs", "mode", "vectors", "mismatches", "full_adders", "half_adders", "stages",
                   "output_width"});
    csv.cell(n).cell(std::string(exhaustive ? "exhaustive" : "sampled")).cell(vectors).cell(bad)
        .cell(tree.fa_count()).cell(tree.ha_count()).cell(tree.stages()).cell(tree.output_width());
    csv.end_row();
    log << n << "-input APC (" << tree.fa_count() << " FA, " << tree.ha_count() << " HA): " << bad
        << " mismatches over " << vectors << (exhaustive ? " (exhaustive)" : " (sampled)") << " vectors\n";
    return bad == 0 ? kExitOk : kExitVerifyFailed;
}

// ---------------------------------------------------------------------------

Dataset load_dataset(const RunConfig& c, const Shape& shape) {
    Dataset d = c.csv.empty() ? load_idx_dataset(c.images, c.labels) : load_csv_dataset(c.csv, shape);
    if (d.shape.size() != shape.size()) {
        throw std::runtime_error("dataset images have " + std::to_string(d.shape.size()) +
                                 " pixels, model expects " + std::to_string(shape.size()));
    }
    d = take_first(d, c.limit);
    if (d.samples.empty()) throw std::runtime_error("dataset is empty");
    return d;
}

int cmd_infer(const RunConfig& c, std::ostream& log) {
    if (c.k_values.empty() || c.n_bits_values.empty()) throw std::invalid_argument("infer needs k and n_bits");
    const FloatModel model = load_model(c.model);
    const Dataset data = load_dataset(c, model.input);
    const std::size_t k = c.k_values.front();
    const unsigned n_bits = c.n_bits_values.front();
    const QuantizedModel q = quantize(model, n_bits);

    std::vector<std::string> cols{"image", "label", "fixed_pred", "sc_pred"};
    for (std::size_t i = 0; i < q.num_outputs(); ++i) cols.push_back("score_" + std::to_string(i));
    CsvWriter csv(out_file(c, "infer.csv"), header("infer", c) + " k=" + std::to_string(k) +
                                                " n_bits=" + std::to_string(n_bits) + " pcc=" +
                                                std::string(to_string(c.pcc)),
                  cols);
    std::size_t fixed_ok = 0;
    std::size_t sc_ok = 0;
    for (std::size_t i = 0; i < data.samples.size(); ++i) {
        const Sample& s = data.samples[i];
        const auto fixed = fixed_point_infer(q, s.pixels);
        const auto sc = sc_infer(q, s.pixels, {k, c.pcc, c.source, derive_seed(c.seed, {i})});
        const std::size_t fp = argmax(fixed);
        const std::size_t sp = argmax(sc);
        fixed_ok += fp == static_cast<std::size_t>(s.label) ? 1 : 0;
        sc_ok += sp == static_cast<std::size_t>(s.label) ? 1 : 0;
        csv.cell(i).cell(s.label).cell(fp).cell(sp);
        for (double v : sc) csv.cell(v);
        csv.end_row();
    }
    const auto n = static_cast<double>(data.samples.size());
    log << "images " << data.samples.size() << ": fixed-point accuracy " << fmt(static_cast<double>(fixed_ok) / n)
        << ", SC accuracy " << fmt(static_cast<double>(sc_ok) / n) << " (k=" << k << ", n_bits=" << n_bits << ")\n";
    return kExitOk;
}

int cmd_sweep(const RunConfig& c, std::ostream& log) {
    if (c.k_values.empty() || c.n_bits_values.empty()) throw std::invalid_argument("sweep needs k and n_bits");
    if (c.repeats == 0) throw std::invalid_argument("repeats must be positive");
    const FloatModel model = load_model(c.model);
    const Dataset data = load_dataset(c, model.input);

    CsvWriter fixed_csv(out_file(c, "sweep_fixed.csv"), header("sweep", c), {"n_bits", "accuracy", "n_images"});
    std::map<unsigned, double> fixed;
    for (unsigned nb : c.n_bits_values) {
        const EvalReport r = fixed_point_accuracy(model, data, nb);
        fixed[nb] = r.accuracy;
        fixed_csv.cell(nb).cell(r.accuracy).cell(r.n_images);
        fixed_csv.end_row();
    }

    CsvWriter csv(out_file(c, "sweep.csv"), header("sweep", c) + " pcc=" + std::string(to_string(c.pcc)),
                  {"k", "n_bits", "accuracy", "n_images", "seed"});
    std::map<std::pair<unsigned, std::size_t>, std::vector<double>> acc;
    for (std::size_t r = 0; r < c.repeats; ++r) {
        const std::uint64_t seed = r == 0 ? c.seed : derive_seed(c.seed, {r});
        for (const EvalReport& e : accuracy_sweep(model, data, c.k_values, c.n_bits_values, seed, {c.pcc, c.source})) {
            csv.cell(e.k).cell(e.n_bits).cell(e.accuracy).cell(e.n_images).cell(seed_hex(e.seed));
            csv.end_row();
            acc[{e.n_bits, e.k}].push_back(e.accuracy);
            log << "n_bits=" << e.n_bits << " k=" << e.k << " seed=" << seed_hex(seed) << " accuracy "
                << fmt(e.accuracy) << '\n';
        }
    }

    Panel panel{"accuracy vs bitstream length", "k", "accuracy", {}, true};
    for (unsigned nb : c.n_bits_values) {
        Series s{std::to_string(nb) + "-bit SC", {}, {}, true, false};
        Series f{std::to_string(nb) + "-bit fixed", {}, {}, false, true};
        for (std::size_t k : c.k_values) {
            const auto& v = acc[{nb, k}];
            double mean = 0;
            for (double a : v) mean += a;
            s.x.push_back(static_cast<double>(k));
            s.y.push_back(mean / static_cast<double>(v.size()));
            f.x.push_back(static_cast<double>(k));
            f.y.push_back(fixed[nb]);
        }
        panel.series.push_back(std::move(s));
        panel.series.push_back(std::move(f));
    }
    write_svg(out_file(c, "sweep.svg"), {panel}, 1);
    return kExitOk;
}

// ---------------------------------------------------------------------------

namespace {

double linear_r2(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) sx += x[i], sy += y[i], sxx += x[i] * x[i], sxy += x[i] * y[i];
    const double slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
    const double icept = (sy - slope * sx) / n;
    double ss_res = 0, ss_tot = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double f = icept + slope * x[i];
        ss_res += (y[i] - f) * (y[i] - f);
        ss_tot += (y[i] - sy / n) * (y[i] - sy / n);
    }
    return ss_tot == 0 ? 1.0 : 1.0 - ss_res / ss_tot;
}

}  // namespace

int cmd_arch_report(const RunConfig& c, std::ostream& log) {
    if (c.ch_min == 0 || c.ch_min > c.ch_max) throw std::invalid_argument("channel range must satisfy 1 <= min <= max");
    const FloatModel model = load_model(c.model);
    const auto layers = network_workloads(model, c.arch_n_bits);
    std::vector<TechProfile> profiles;
    if (c.profiles.empty()) {
        profiles = {finfet_10nm(), rfet_10nm()};
    } else {
        for (const auto& p : c.profiles) profiles.push_back(load_profile(p));
    }
    std::vector<std::size_t> channels;
    for (std::size_t ch = c.ch_min; ch <= c.ch_max; ++ch) channels.push_back(ch);
    AcceleratorConfig base;
    base.k = c.arch_k;
    base.n_bits = c.arch_n_bits;
    const MemoryModel mem{c.bandwidth};
    const SweepReport report = channel_sweep(layers, channels, profiles, mem, base);

    const std::string head = header("arch-report", c) + " k=" + std::to_string(c.arch_k) + " n_bits=" +
                             std::to_string(c.arch_n_bits) + " bandwidth=" + fmt(c.bandwidth);
    CsvWriter csv(out_file(c, "arch_sweep.csv"), head,
                  {"channels", "profile", "area_um2", "latency_ns", "energy_pJ", "adp", "edp", "edap"});
    for (const SweepRow& r : report.rows) {
        csv.cell(r.channels).cell(r.profile).cell(r.area_um2).cell(r.latency_ns).cell(r.energy_pJ).cell(r.m.adp)
            .cell(r.m.edp).cell(r.m.edap);
        csv.end_row();
    }

    CsvWriter summary(out_file(c, "arch_summary.csv"), head,
                      {"profile", "argmin_adp", "argmin_edp", "argmin_edap", "area_r2", "latency_monotone"});
    std::vector<Panel> panels(6);
    const char* names[] = {"area (um^2)", "latency (ns)", "energy (pJ)", "ADP", "EDP", "EDAP"};
    for (std::size_t i = 0; i < 6; ++i) panels[i] = {names[i], "channels", names[i], {}, false};
    for (std::size_t pi = 0; pi < profiles.size(); ++pi) {
        const auto& p = profiles[pi];
        std::vector<double> x, area, lat;
        std::vector<Series> s(6);
        for (auto& one : s) one = {p.name, {}, {}, true, pi % 2 == 1};
        for (const SweepRow& r : report.rows) {
            if (r.profile != p.name) continue;
            const double ch = static_cast<double>(r.channels);
            x.push_back(ch);
            area.push_back(r.area_um2);
            lat.push_back(r.latency_ns);
            const double vals[] = {r.area_um2, r.latency_ns, r.energy_pJ, r.m.adp, r.m.edp, r.m.edap};
            for (std::size_t i = 0; i < 6; ++i) s[i].x.push_back(ch), s[i].y.push_back(vals[i]);
        }
        for (std::size_t i = 0; i < 6; ++i) panels[i].series.push_back(std::move(s[i]));
        bool monotone = true;
        for (std::size_t i = 1; i < lat.size(); ++i) monotone = monotone && lat[i] <= lat[i - 1];
        const double r2 = x.size() > 1 ? linear_r2(x, area) : 1.0;
        const SweepArgmin& a = report.argmin[pi];
        summary.cell(p.name).cell(a.adp).cell(a.edp).cell(a.edap).cell(r2).cell(monotone ? 1 : 0);
        summary.end_row();
        log << p.name << ": argmin ADP=" << a.adp << " EDP=" << a.edp << " EDAP=" << a.edap << " channels, area R^2 "
            << fmt(r2) << ", latency " << (monotone ? "non-increasing" : "NOT monotone") << '\n';
    }
    write_svg(out_file(c, "arch_sweep.svg"), panels);

    if (profiles.size() >= 2) {
        const TechProfile& ref = profiles[0];
        const TechProfile& cand = profiles[1];
        CsvWriter gains(out_file(c, "arch_gains.csv"), head + " reference=" + ref.name + " candidate=" + cand.name,
                        {"quantity", "reference", "candidate", "gain_percent"});
        auto row = [&](const std::string& q, double a, double b) {
            gains.cell(q).cell(a).cell(b).cell(gain_percent(a, b));
            gains.end_row();
            log << "  " << q << ": " << fmt(a) << " -> " << fmt(b) << " gain " << fmt(gain_percent(a, b)) << "%\n";
        };
        for (const char* block : {"pcc", "apc", "channel"}) {
            const BlockCost x = ref.block(block);
            const BlockCost y = cand.block(block);
            row(std::string(block) + "_area_um2", x.area_um2, y.area_um2);
            row(std::string(block) + "_delay_ps", x.delay_ps, y.delay_ps);
            row(std::string(block) + "_energy_fJ", x.energy_fJ, y.energy_fJ);
        }
        const std::size_t at = report.argmin[0].edap;
        const SweepRow& ra = report.at(ref.name, at);
        const SweepRow& rb = report.at(cand.name, at);
        const std::string sfx = "_at_" + std::to_string(at) + "ch";
        row("system_area" + sfx, ra.area_um2, rb.area_um2);
        row("system_latency" + sfx, ra.latency_ns, rb.latency_ns);
        row("system_energy" + sfx, ra.energy_pJ, rb.energy_pJ);
        row("system_edap" + sfx, ra.m.edap, rb.m.edap);

        std::vector<BarGroup> bars;
        for (std::size_t ch : channels) {
            bars.push_back({std::to_string(ch), {report.at(ref.name, ch).m.edap, report.at(cand.name, ch).m.edap}});
        }
        write_bar_svg(out_file(c, "arch_edap.svg"), "EDAP per channel count", {ref.name, cand.name}, bars);
    }
    return kExitOk;
}

}  // namespace scsim::cli
