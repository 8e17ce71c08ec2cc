#include "hdpa/attack.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "hdpa/errors.hpp"

namespace hdpa {

SlotMatrix fragment(const PowerTrace& trace) {
    if (!trace.layout) throw FormatError("trace has no slot layout");
    const ScheduleLayout& layout = *trace.layout;
    const std::size_t needed = layout.postamble_start();
    if (trace.values.size() < needed)
        throw FormatError("trace has " + std::to_string(trace.values.size()) + " cycles, layout needs " +
                          std::to_string(needed));
    SlotMatrix m;
    m.rows = layout.slot_count;
    m.values.reserve(m.rows * SlotMatrix::kColumns);
    for (std::size_t t = 0; t < m.rows; ++t) {
        const auto first = trace.values.begin() + static_cast<std::ptrdiff_t>(layout.slot_start(t));
        m.values.insert(m.values.end(), first, first + SlotMatrix::kColumns);
        m.key_bit.push_back(layout.key_bit_of_slot(t));
    }
    return m;
}

MeanSlot mean_slot(const SlotMatrix& m) {
    if (m.rows == 0) throw ArgumentError("mean_slot: empty slot matrix");
    MeanSlot mean(SlotMatrix::kColumns, 0.0);
    for (std::size_t t = 0; t < m.rows; ++t)
        for (std::size_t j = 0; j < SlotMatrix::kColumns; ++j) mean[j] += m.at(t, j);
    for (double& v : mean) v /= static_cast<double>(m.rows);
    return mean;
}

std::vector<KeyBits> derive_candidates(const SlotMatrix& m, const MeanSlot& mean) {
    if (mean.size() != SlotMatrix::kColumns) throw ArgumentError("derive_candidates: mean slot has wrong width");
    std::vector<KeyBits> out(SlotMatrix::kColumns, KeyBits(m.rows));
    for (std::size_t j = 0; j < SlotMatrix::kColumns; ++j)
        for (std::size_t t = 0; t < m.rows; ++t) out[j][t] = mean[j] >= m.at(t, j) ? 1 : 0;
    return out;
}

double fold(double delta_raw) { return 50.0 + std::fabs(50.0 - delta_raw); }

Correctness correctness(const KeyBits& candidate, const Scalar& k) {
    if (k.length() < 3 || candidate.size() != k.length() - 2)
        throw ArgumentError("correctness: candidate has " + std::to_string(candidate.size()) + " bits, key has " +
                            std::to_string(k.length() < 2 ? 0 : k.length() - 2));
    std::size_t matches = 0;
    for (std::size_t t = 0; t < candidate.size(); ++t)
        matches += (candidate[t] != 0) == k.bit(k.length() - 3 - t) ? 1 : 0;
    Correctness c;
    c.delta_raw = 100.0 * static_cast<double>(matches) / static_cast<double>(candidate.size());
    c.delta_folded = fold(c.delta_raw);
    return c;
}

namespace {

void finish(AttackReport& r) {
    r.best_j = 0;
    double best = -1;
    r.sorted_folded.clear();
    for (const auto& c : r.candidates) {
        if (c.score.delta_folded > best) {
            best = c.score.delta_folded;
            r.best_j = c.j;
        }
        r.sorted_folded.push_back(c.score.delta_folded);
    }
    std::sort(r.sorted_folded.begin(), r.sorted_folded.end(), std::greater<>());
}

// Candidate indices ordered by folded correctness, lowest j first on ties.
std::vector<std::size_t> sorted_order(const AttackReport& r) {
    std::vector<std::size_t> idx(r.candidates.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
        return r.candidates[a].score.delta_folded > r.candidates[b].score.delta_folded;
    });
    return idx;
}

}  // namespace

AttackReport run_attack(const PowerTrace& trace, const Scalar& k) {
    if (trace.layout && trace.layout->scalar_length != k.length())
        throw ValidationError("scalar has " + std::to_string(k.length()) + " bits, trace was recorded for l=" +
                              std::to_string(trace.layout->scalar_length));
    const SlotMatrix m = fragment(trace);
    const auto cands = derive_candidates(m, mean_slot(m));
    AttackReport r;
    r.metadata = trace.metadata;
    r.layout = trace.layout;
    for (std::size_t j = 0; j < cands.size(); ++j) r.candidates.push_back({j + 1, cands[j], correctness(cands[j], k)});
    finish(r);
    return r;
}

void write_report_csv(std::ostream& out, const AttackReport& report) {
    write_metadata(out, report.metadata, report.layout);
    out << "j,delta_raw,delta_folded\n";
    for (const auto& c : report.candidates)
        out << c.j << ',' << format_double(c.score.delta_raw) << ',' << format_double(c.score.delta_folded) << '\n';
    if (!out) throw IoError("failed writing report");
}

void write_sorted_csv(std::ostream& out, const AttackReport& report) {
    write_metadata(out, report.metadata, report.layout);
    out << "rank,j,delta_folded\n";
    std::size_t rank = 1;
    for (std::size_t i : sorted_order(report)) {
        const auto& c = report.candidates[i];
        out << rank++ << ',' << c.j << ',' << format_double(c.score.delta_folded) << '\n';
    }
    if (!out) throw IoError("failed writing sorted report");
}

AttackReport read_report_csv(std::istream& in) {
    AttackReport r;
    std::string line;
    std::size_t line_no = 0;
    bool header = false;
    auto fail = [&](const std::string& what) -> void {
        throw FormatError("line " + std::to_string(line_no) + ": " + what);
    };
    auto number = [&](std::string_view s) {
        double v = 0;
        const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
        if (s.empty() || res.ec != std::errc{} || res.ptr != s.data() + s.size()) fail("bad number '" + std::string(s) + "'");
        return v;
    };
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view s = line;
        if (!s.empty() && s.back() == '\r') s.remove_suffix(1);
        if (s.empty()) continue;
        if (!header) {
            if (s.front() == '#') {
                read_metadata_line(s.substr(1), line_no, r.metadata, r.layout);
                continue;
            }
            if (s != "j,delta_raw,delta_folded") fail("expected header 'j,delta_raw,delta_folded'");
            header = true;
            continue;
        }
        const auto c1 = s.find(','), c2 = s.find(',', c1 == s.npos ? c1 : c1 + 1);
        if (c1 == s.npos || c2 == s.npos || s.find(',', c2 + 1) != s.npos) fail("expected three fields");
        CandidateResult c;
        const double j = number(s.substr(0, c1));
        if (j != static_cast<double>(r.candidates.size() + 1)) fail("j out of sequence");
        c.j = static_cast<std::size_t>(j);
        c.score.delta_raw = number(s.substr(c1 + 1, c2 - c1 - 1));
        c.score.delta_folded = number(s.substr(c2 + 1));
        if (c.score.delta_raw < 0 || c.score.delta_raw > 100 || c.score.delta_folded != fold(c.score.delta_raw))
            fail("inconsistent correctness values");
        r.candidates.push_back(std::move(c));
    }
    if (!header) fail("missing header");
    if (r.candidates.size() != SlotMatrix::kColumns)
        throw FormatError("report has " + std::to_string(r.candidates.size()) + " rows, expected 54");
    finish(r);
    return r;
}

}  // namespace hdpa
