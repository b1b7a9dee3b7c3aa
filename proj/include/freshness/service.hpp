#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "freshness/random.hpp"
#include "freshness/types.hpp"

namespace freshness {

/// Finite-support pmf of the i.i.d. integer service times Y_i.
///
/// Support points are distinct integers >= 1, stored ascending. The declared
/// probabilities must sum to 1 within 1e-12 and are then renormalized so the
/// stored masses sum to 1 as exactly as floating point allows.
class ServiceTimeDist {
public:
    struct Atom {
        Steps y = 1;
        double prob = 1.0;
        bool operator==(const Atom&) const = default;
    };

    static ServiceTimeDist from_atoms(std::vector<Atom> atoms);
    static ServiceTimeDist deterministic(Steps y) { return from_atoms({{y, 1.0}}); }

    /// Parses "y:prob, y:prob, ..." (whitespace and commas separate pairs).
    static ServiceTimeDist parse(std::string_view text) { return from_atoms(parse_atoms(text)); }

    /// The declared atoms of "y:prob, ..." without validation or
    /// normalization. Throws ValidationError on syntax errors.
    static std::vector<Atom> parse_atoms(std::string_view text);

    std::span<const Atom> support() const { return atoms_; }
    std::size_t size() const { return atoms_.size(); }
    Steps min_y() const { return atoms_.front().y; }
    Steps max_y() const { return atoms_.back().y; }
    bool contains(Steps y) const;

    /// E[Y], exact sum over the support.
    double mean() const { return mean_; }

    /// E[f(Y)]. A +infinity term makes the whole expectation +infinity.
    template <class F>
    double expect(F&& f) const {
        double total = 0.0;
        bool infinite = false;
        for (const Atom& atom : atoms_) {
            const double v = f(atom.y);
            if (v == std::numeric_limits<double>::infinity()) {
                infinite = true;
            } else {
                total += atom.prob * v;
            }
        }
        return infinite ? std::numeric_limits<double>::infinity() : total;
    }

    /// Inverse-CDF draw using one uniform variate from rng.
    Steps sample(Rng& rng) const;

    std::string to_string() const;

    bool operator==(const ServiceTimeDist& other) const { return atoms_ == other.atoms_; }

private:
    explicit ServiceTimeDist(std::vector<Atom> atoms);

    std::vector<Atom> atoms_;
    std::vector<double> cdf_;
    double mean_ = 0.0;
};

} // namespace freshness
