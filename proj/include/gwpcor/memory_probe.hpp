#pragma once

namespace gwpcor {

/// Peak resident-set growth of this process between reset() and peak_delta_mb().
/// Linux-only (reads /proc/self/status); elsewhere both calls report zero.
/// When the kernel refuses to reset the high-water mark the delta is measured
/// against the process-lifetime peak, which over-approximates.
class PeakMemoryProbe {
public:
    void reset();
    double peak_delta_mb() const;

private:
    double baseline_kb_ = 0.0;
};

/// Current resident set size, MB.
double resident_mb();

} // namespace gwpcor
