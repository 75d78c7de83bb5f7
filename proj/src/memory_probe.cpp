#include "gwpcor/memory_probe.hpp"

#include <fstream>
#include <string>

namespace gwpcor {

namespace {

double status_field_kb(const std::string& field)
{
    std::ifstream in("/proc/self/status");
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind(field + ":", 0) == 0) return std::stod(line.substr(field.size() + 1));
    }
    return 0.0;
}

} // namespace

void PeakMemoryProbe::reset()
{
    // "5" resets VmHWM to the current RSS.
    std::ofstream clear("/proc/self/clear_refs");
    if (clear) clear << "5";
    baseline_kb_ = status_field_kb("VmRSS");
}

double PeakMemoryProbe::peak_delta_mb() const
{
    const double peak = status_field_kb("VmHWM");
    return peak > baseline_kb_ ? (peak - baseline_kb_) / 1024.0 : 0.0;
}

double resident_mb()
{
    return status_field_kb("VmRSS") / 1024.0;
}

} // namespace gwpcor
