#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "donorsim/types.hpp"

namespace donorsim {

struct SpectrumLine {
    double frequency = 0.0;  // MHz, |E_f - E_i|
    double intensity = 0.0;  // |<f|D|i>|^2
    int i = 0;               // lower eigenstate index (ascending energy)
    int f = 0;               // upper eigenstate index
    std::optional<int> delta_m;
    std::string label;
};

struct SpectrumOptions {
    /// Lines closer than this (MHz) are merged and their intensities summed.
    double merge_tolerance = 1e-9;
    /// When set, delta_m is assigned from <M> of the two eigenstates whenever
    /// the difference is within 0.1 of an integer.
    std::optional<HermitianOperator> m_operator;
};

/// Merges sorted lines closer than `tolerance`; the strongest member keeps its labels.
inline std::vector<SpectrumLine> merge_lines(std::vector<SpectrumLine> lines, double tolerance) {
    std::sort(lines.begin(), lines.end(),
              [](const SpectrumLine& a, const SpectrumLine& b) { return a.frequency < b.frequency; });
    std::vector<SpectrumLine> merged;
    for (const auto& line : lines) {
        if (!merged.empty() && line.frequency - merged.back().frequency <= tolerance) {
            SpectrumLine& last = merged.back();
            const double total = last.intensity + line.intensity;
            if (line.intensity > last.intensity) {
                SpectrumLine keep = line;
                keep.frequency = last.frequency;
                last = keep;
            }
            last.intensity = total;
        } else {
            merged.push_back(line);
        }
    }
    return merged;
}

/// All transitions of H whose drive matrix element satisfies |<f|D|i>|^2 > threshold,
/// sorted by frequency.
inline std::vector<SpectrumLine> transition_spectrum(const HermitianOperator& H, const HermitianOperator& drive,
                                                     double threshold, const SpectrumOptions& opt = {}) {
    require(H.dim() == drive.dim(), "transition_spectrum: Hamiltonian and drive dimensions differ");
    require(threshold >= 0.0, "transition_spectrum: threshold must be non-negative");
    const EigenSystem es = diagonalize(H);
    const Matrix d = es.vectors.adjoint() * drive.matrix() * es.vectors;

    std::vector<double> m_expect;
    if (opt.m_operator) {
        require(opt.m_operator->dim() == H.dim(), "transition_spectrum: m_operator dimension differs");
        const Matrix m = es.vectors.adjoint() * opt.m_operator->matrix() * es.vectors;
        for (Eigen::Index k = 0; k < m.rows(); ++k) m_expect.push_back(m(k, k).real());
    }

    std::vector<SpectrumLine> lines;
    const auto n = static_cast<int>(H.dim());
    for (int i = 0; i < n; ++i) {
        for (int f = i + 1; f < n; ++f) {
            const double intensity = std::norm(d(f, i));
            if (intensity <= threshold) continue;
            SpectrumLine line;
            line.frequency = std::abs(es.values(f) - es.values(i));
            line.intensity = intensity;
            line.i = i;
            line.f = f;
            if (!m_expect.empty()) {
                const double dm = m_expect[f] - m_expect[i];
                if (std::abs(dm - std::round(dm)) < 0.1) line.delta_m = static_cast<int>(std::lround(dm));
            }
            lines.push_back(line);
        }
    }
    return merge_lines(std::move(lines), opt.merge_tolerance);
}

inline nlohmann::json to_json(const SpectrumLine& line) {
    nlohmann::json labels{{"i", line.i}, {"f", line.f}};
    labels["delta_m"] = line.delta_m ? nlohmann::json(*line.delta_m) : nlohmann::json(nullptr);
    if (!line.label.empty()) labels["label"] = line.label;
    return {{"freq_MHz", line.frequency}, {"intensity", line.intensity}, {"labels", labels}};
}

inline nlohmann::json to_json(const std::vector<SpectrumLine>& lines) {
    nlohmann::json out = nlohmann::json::array();
    for (const auto& l : lines) out.push_back(to_json(l));
    return out;
}

}  // namespace donorsim
