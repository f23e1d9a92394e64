// Time-stamped states with named scalar observables recorded alongside.
#pragma once

#include "geomech/core.hpp"

#include <algorithm>
#include <string>
#include <vector>

namespace geomech {

/// Scalar function of a state, recorded per sample.
struct Observable {
    std::string name;
    std::function<double(const VecX&)> eval;
};

struct Series {
    std::string name;
    std::vector<double> values;
};

class Trajectory {
public:
    Trajectory() = default;
    explicit Trajectory(std::vector<Observable> observables) : observables_(std::move(observables)) {
        for (const auto& o : observables_) series_.push_back({o.name, {}});
    }

    /// Appends a sample; times must strictly increase.
    void record(double t, const VecX& state) {
        if (!times_.empty() && !(t > times_.back())) throw DomainError("Trajectory: times must be strictly increasing");
        times_.push_back(t);
        states_.push_back(state);
        for (std::size_t i = 0; i < observables_.size(); ++i) series_[i].values.push_back(observables_[i].eval(state));
    }

    std::size_t size() const { return times_.size(); }
    bool empty() const { return times_.empty(); }

    const std::vector<double>& times() const { return times_; }
    const std::vector<VecX>& states() const { return states_; }
    const std::vector<Series>& observables() const { return series_; }

    const std::vector<double>& series(const std::string& name) const {
        auto it = std::find_if(series_.begin(), series_.end(), [&](const Series& s) { return s.name == name; });
        if (it == series_.end()) throw DomainError("Trajectory: no observable named '" + name + "'");
        return it->values;
    }

private:
    std::vector<Observable> observables_;
    std::vector<double> times_;
    std::vector<VecX> states_;
    std::vector<Series> series_;
};

}  // namespace geomech
