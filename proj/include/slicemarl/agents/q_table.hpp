#ifndef SLICEMARL_AGENTS_Q_TABLE_HPP
#define SLICEMARL_AGENTS_Q_TABLE_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace slicemarl {

struct LearnerConfig {
    double alpha = 0.5;
    double gamma = 0.2;
    double epsilon = 0.3;
    int n_step = 1;
    bool epsilon_decay = false;
    double epsilon_min = 0.01;

    bool operator==(const LearnerConfig&) const = default;

    /// Exploration rate for an episode; linear decay to epsilon_min over the
    /// run when epsilon_decay is set.
    double epsilon_at(int episode, int episodes) const {
        if (!epsilon_decay || episodes <= 1) return epsilon;
        const double frac = static_cast<double>(episode) / (episodes - 1);
        return std::lerp(epsilon, std::min(epsilon_min, epsilon), frac);
    }
};

/// Dense tabular action values, zero-initialised, with visit counts.
class QTable {
public:
    QTable(int num_states, int num_actions)
        : states_(num_states), actions_(num_actions),
          values_(static_cast<std::size_t>(num_states) * static_cast<std::size_t>(num_actions), 0.0),
          visits_(values_.size(), 0) {
        if (num_states < 1 || num_actions < 1) throw std::invalid_argument("empty Q-table");
    }

    int num_states() const { return states_; }
    int num_actions() const { return actions_; }

    double value(int state, int action) const { return values_[at(state, action)]; }
    std::uint64_t visits(int state, int action) const { return visits_[at(state, action)]; }

    void set(int state, int action, double v) {
        if (!std::isfinite(v)) throw std::invalid_argument("Q-values must be finite");
        values_[at(state, action)] = v;
    }

    void record_visit(int state, int action) { ++visits_[at(state, action)]; }

    /// Greedy action over [0, last_action]; ties go to the lowest index.
    int argmax(int state, int last_action) const {
        int best = 0;
        double best_v = value(state, 0);
        for (int a = 1; a <= last_action; ++a) {
            const double v = value(state, a);
            if (v > best_v) {
                best_v = v;
                best = a;
            }
        }
        return best;
    }

    int argmax(int state) const { return argmax(state, actions_ - 1); }

    double max_value(int state) const { return value(state, argmax(state)); }

    void scale(double k) {
        for (auto& v : values_) v *= k;
    }

    bool operator==(const QTable&) const = default;

    /// Flat CSV: state,action,value,visits for every entry.
    void write_csv(std::ostream& os) const {
        os << "state,action,value,visits\n";
        char buf[64];
        for (int s = 0; s < states_; ++s) {
            for (int a = 0; a < actions_; ++a) {
                std::snprintf(buf, sizeof buf, "%.17g", value(s, a));
                os << s << ',' << a << ',' << buf << ',' << visits(s, a) << '\n';
            }
        }
    }

    static QTable read_csv(std::istream& is, int num_states, int num_actions) {
        QTable t(num_states, num_actions);
        std::string line;
        if (!std::getline(is, line) || line != "state,action,value,visits")
            throw std::runtime_error("bad Q-table header");
        while (std::getline(is, line)) {
            if (line.empty()) continue;
            std::istringstream row(line);
            int s = 0, a = 0;
            double v = 0;
            std::uint64_t n = 0;
            char c1 = 0, c2 = 0, c3 = 0;
            if (!(row >> s >> c1 >> a >> c2 >> v >> c3 >> n) || c1 != ',' || c2 != ',' || c3 != ',')
                throw std::runtime_error("malformed Q-table row: " + line);
            t.set(s, a, v);
            t.visits_[t.at(s, a)] = n;
        }
        return t;
    }

private:
    std::size_t at(int state, int action) const {
        if (state < 0 || state >= states_ || action < 0 || action >= actions_)
            throw std::out_of_range("Q-table index out of range");
        return static_cast<std::size_t>(state) * static_cast<std::size_t>(actions_) +
               static_cast<std::size_t>(action);
    }

    int states_;
    int actions_;
    std::vector<double> values_;
    std::vector<std::uint64_t> visits_;
};

} // namespace slicemarl

#endif // SLICEMARL_AGENTS_Q_TABLE_HPP
