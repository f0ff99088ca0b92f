#pragma once

#include <optional>
#include <string>
#include <vector>

#include "donorsim/types.hpp"

namespace donorsim {

enum class SegmentKind { delay, mw_drive, rf_drive, electric_drive };

inline std::string to_string(SegmentKind k) {
    switch (k) {
        case SegmentKind::delay: return "delay";
        case SegmentKind::mw_drive: return "mw_drive";
        case SegmentKind::rf_drive: return "rf_drive";
        case SegmentKind::electric_drive: return "electric_drive";
    }
    return "?";
}

/// One piece of a pulse sequence. During a drive segment the Hamiltonian gains
/// amplitude * cos(2 pi frequency t + phase) * drive_operator, with t measured
/// from the start of the sequence so consecutive segments stay phase coherent.
/// Magnetic drives take amplitude in tesla and a drive operator in MHz/T;
/// electric drives take amplitude in MHz and a dimensionless operator.
struct PulseSegment {
    SegmentKind kind = SegmentKind::delay;
    double duration = 0.0;   // us
    double frequency = 0.0;  // MHz
    double amplitude = 0.0;
    double phase = 0.0;      // rad
    std::optional<HermitianOperator> drive_operator;

    bool is_drive() const { return kind != SegmentKind::delay && amplitude != 0.0; }

    void validate() const {
        require(std::isfinite(duration) && duration >= 0.0, "pulse segment duration must be >= 0");
        require(std::isfinite(amplitude) && amplitude >= 0.0, "pulse segment amplitude must be >= 0");
        require(std::isfinite(frequency) && frequency >= 0.0, "pulse segment frequency must be >= 0");
        require(std::isfinite(phase), "pulse segment phase must be finite");
        if (is_drive()) require(drive_operator.has_value(), "drive segment without a drive operator");
    }

    static PulseSegment delay(double duration) { return {SegmentKind::delay, duration, 0.0, 0.0, 0.0, {}}; }

    static PulseSegment drive(SegmentKind kind, double duration, double frequency, double amplitude, double phase,
                              HermitianOperator op) {
        return {kind, duration, frequency, amplitude, phase, std::move(op)};
    }
};

class PulseSequence {
public:
    PulseSequence() = default;
    explicit PulseSequence(std::vector<PulseSegment> segments) {
        for (auto& s : segments) add(std::move(s));
    }

    PulseSequence& add(PulseSegment s) {
        s.validate();
        total_ += s.duration;
        segments_.push_back(std::move(s));
        return *this;
    }

    const std::vector<PulseSegment>& segments() const { return segments_; }
    double total_duration() const { return total_; }
    bool empty() const { return segments_.empty(); }

    /// Frequency of the first drive segment, if any.
    std::optional<double> first_drive_frequency() const {
        for (const auto& s : segments_)
            if (s.is_drive()) return s.frequency;
        return std::nullopt;
    }

private:
    std::vector<PulseSegment> segments_;
    double total_ = 0.0;
};

}  // namespace donorsim
