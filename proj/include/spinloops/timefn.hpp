#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <numbers>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "errors.hpp"

namespace spinloops {

// A time function is a finite sum of the terms below. The family is closed
// under differentiation and (term-wise) antidifferentiation, which is all
// the dynamics code ever needs; no general CAS here.

// c * t^k, k >= 0
struct PolyTerm {
    double coeff = 0.0;
    int power = 0;
    friend bool operator==(const PolyTerm&, const PolyTerm&) = default;
};

// a * sin(w t + phi)
struct SinTerm {
    double amp = 0.0;
    double omega = 0.0;
    double phase = 0.0;
    friend bool operator==(const SinTerm&, const SinTerm&) = default;
};

// a * cos(w t + phi)
struct CosTerm {
    double amp = 0.0;
    double omega = 0.0;
    double phase = 0.0;
    friend bool operator==(const CosTerm&, const CosTerm&) = default;
};

using Term = std::variant<PolyTerm, SinTerm, CosTerm>;

namespace detail {

inline double ipow(double t, int k) {
    double r = 1.0;
    for (int i = 0; i < k; ++i) r *= t;
    return r;
}

inline double eval_term(const Term& term, double t) {
    if (const auto* p = std::get_if<PolyTerm>(&term))
        return p->coeff * ipow(t, p->power);
    if (const auto* s = std::get_if<SinTerm>(&term))
        return s->amp * std::sin(s->omega * t + s->phase);
    const auto& c = std::get<CosTerm>(term);
    return c.amp * std::cos(c.omega * t + c.phase);
}

}  // namespace detail

class TimeFn {
public:
    TimeFn() = default;
    explicit TimeFn(std::vector<Term> terms) : terms_(std::move(terms)) { normalize(); }

    static TimeFn zero() { return TimeFn{}; }
    static TimeFn constant(double c) { return TimeFn{{PolyTerm{c, 0}}}; }
    static TimeFn linear(double slope) { return TimeFn{{PolyTerm{slope, 1}}}; }

    const std::vector<Term>& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }

    // True when the function is a constant (no time dependence left).
    bool is_constant() const noexcept {
        for (const auto& term : terms_) {
            const auto* p = std::get_if<PolyTerm>(&term);
            if (!p || p->power != 0) return false;
        }
        return true;
    }

    double operator()(double t) const {
        if (!std::isfinite(t))
            throw std::invalid_argument("TimeFn: evaluation point must be finite");
        double sum = 0.0;
        for (const auto& term : terms_) sum += detail::eval_term(term, t);
        return sum;
    }

    double eval(double t) const { return (*this)(t); }

    TimeFn derivative() const {
        std::vector<Term> out;
        out.reserve(terms_.size());
        for (const auto& term : terms_) {
            if (const auto* p = std::get_if<PolyTerm>(&term)) {
                if (p->power > 0) out.push_back(PolyTerm{p->coeff * p->power, p->power - 1});
            } else if (const auto* s = std::get_if<SinTerm>(&term)) {
                out.push_back(CosTerm{s->amp * s->omega, s->omega, s->phase});
            } else {
                const auto& c = std::get<CosTerm>(term);
                out.push_back(SinTerm{-c.amp * c.omega, c.omega, c.phase});
            }
        }
        return TimeFn{std::move(out)};
    }

    // Antiderivative F with F(0) = 0. Sinusoid terms with omega == 0 are
    // constants and integrate to linear terms.
    TimeFn antiderivative() const {
        std::vector<Term> out;
        out.reserve(terms_.size() + 1);
        for (const auto& term : terms_) {
            if (const auto* p = std::get_if<PolyTerm>(&term)) {
                out.push_back(PolyTerm{p->coeff / (p->power + 1), p->power + 1});
            } else if (const auto* s = std::get_if<SinTerm>(&term)) {
                if (s->omega != 0.0)
                    out.push_back(CosTerm{-s->amp / s->omega, s->omega, s->phase});
                else
                    out.push_back(PolyTerm{s->amp * std::sin(s->phase), 1});
            } else {
                const auto& c = std::get<CosTerm>(term);
                if (c.omega != 0.0)
                    out.push_back(SinTerm{c.amp / c.omega, c.omega, c.phase});
                else
                    out.push_back(PolyTerm{c.amp * std::cos(c.phase), 1});
            }
        }
        TimeFn f{std::move(out)};
        const double at_zero = f.is_zero() ? 0.0 : f(0.0);
        if (at_zero != 0.0) f = f + constant(-at_zero);
        return f;
    }

    TimeFn scaled(double factor) const {
        std::vector<Term> out = terms_;
        for (auto& term : out) {
            if (auto* p = std::get_if<PolyTerm>(&term))
                p->coeff *= factor;
            else if (auto* s = std::get_if<SinTerm>(&term))
                s->amp *= factor;
            else
                std::get<CosTerm>(term).amp *= factor;
        }
        return TimeFn{std::move(out)};
    }

    friend TimeFn operator+(const TimeFn& a, const TimeFn& b) {
        std::vector<Term> out = a.terms_;
        out.insert(out.end(), b.terms_.begin(), b.terms_.end());
        return TimeFn{std::move(out)};
    }

    friend TimeFn operator-(const TimeFn& a, const TimeFn& b) { return a + b.scaled(-1.0); }

    friend bool operator==(const TimeFn& a, const TimeFn& b) { return a.terms_ == b.terms_; }

    std::string render() const;

private:
    // Canonical form: like terms merged (equal power for polynomials, equal
    // frequency and phase for sinusoids) and sorted. Zero terms are dropped.
    // No trig identities beyond plain like-term collection.
    void normalize() {
        std::vector<PolyTerm> polys;
        std::vector<SinTerm> sins;
        std::vector<CosTerm> coss;
        auto merge_trig = [](auto& bucket, const auto& term) {
            auto it = std::find_if(bucket.begin(), bucket.end(), [&](const auto& other) {
                return other.omega == term.omega && other.phase == term.phase;
            });
            if (it != bucket.end())
                it->amp += term.amp;
            else
                bucket.push_back(term);
        };
        for (const auto& term : terms_) {
            if (const auto* p = std::get_if<PolyTerm>(&term)) {
                auto it = std::find_if(polys.begin(), polys.end(),
                                       [&](const PolyTerm& q) { return q.power == p->power; });
                if (it != polys.end())
                    it->coeff += p->coeff;
                else
                    polys.push_back(*p);
            } else if (const auto* s = std::get_if<SinTerm>(&term)) {
                merge_trig(sins, *s);
            } else {
                merge_trig(coss, std::get<CosTerm>(term));
            }
        }
        std::erase_if(polys, [](const PolyTerm& p) { return p.coeff == 0.0; });
        std::erase_if(sins, [](const SinTerm& s) { return s.amp == 0.0; });
        std::erase_if(coss, [](const CosTerm& c) { return c.amp == 0.0; });
        std::sort(polys.begin(), polys.end(),
                  [](const PolyTerm& a, const PolyTerm& b) { return a.power < b.power; });
        auto trig_less = [](const auto& a, const auto& b) {
            return std::tie(a.omega, a.phase, a.amp) < std::tie(b.omega, b.phase, b.amp);
        };
        std::sort(sins.begin(), sins.end(), trig_less);
        std::sort(coss.begin(), coss.end(), trig_less);

        terms_.clear();
        for (const auto& p : polys) terms_.emplace_back(p);
        for (const auto& s : sins) terms_.emplace_back(s);
        for (const auto& c : coss) terms_.emplace_back(c);
    }

    std::vector<Term> terms_;
};

// ---------------------------------------------------------------------------
// Parsing. Grammar (also documented in the README):
//
//   timefn := [sign] term { sign term }
//   term   := coeff [["*"] factor] | factor
//   factor := "t" ["^" uint] | "sin" "(" affine ")" | "cos" "(" affine ")"
//   affine := [coeff ["*"]] "t" [sign coeff]
//   coeff  := ["-"] cfactor { ("*"|"/") cfactor }
//   cfactor:= number | "pi" | "(" coeff ")"
//
// Whitespace is ignored. Numbers accept the usual decimal/scientific forms.
// ---------------------------------------------------------------------------

namespace detail {

class TimeFnParser {
public:
    explicit TimeFnParser(std::string_view text) : text_(text) {}

    TimeFn parse() {
        std::vector<Term> terms;
        skip_ws();
        if (at_end()) throw ParseError("empty expression", pos_);
        double sign = consume_sign();
        parse_term(sign, terms);
        skip_ws();
        while (!at_end()) {
            const char c = peek();
            if (c != '+' && c != '-')
                throw ParseError(std::string("expected '+' or '-', got '") + c + "'", pos_);
            ++pos_;
            skip_ws();
            parse_term(c == '+' ? 1.0 : -1.0, terms);
            skip_ws();
        }
        return TimeFn{std::move(terms)};
    }

private:
    bool at_end() const { return pos_ >= text_.size(); }
    char peek() const { return text_[pos_]; }

    void skip_ws() {
        while (!at_end() && (peek() == ' ' || peek() == '\t')) ++pos_;
    }

    double consume_sign() {
        double sign = 1.0;
        while (!at_end() && (peek() == '+' || peek() == '-')) {
            if (peek() == '-') sign = -sign;
            ++pos_;
            skip_ws();
        }
        return sign;
    }

    bool at_number_start() const {
        if (at_end()) return false;
        const char c = peek();
        return (c >= '0' && c <= '9') || c == '.';
    }

    bool at_word(std::string_view word) const {
        if (text_.size() - pos_ < word.size()) return false;
        if (text_.substr(pos_, word.size()) != word) return false;
        const std::size_t after = pos_ + word.size();
        // identifiers must not continue ("pit", "sinic", ...)
        if (after < text_.size()) {
            const char c = text_[after];
            if ((c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z')) return false;
        }
        return true;
    }

    bool at_cfactor_start() const {
        return at_number_start() || at_word("pi") || (!at_end() && peek() == '(');
    }

    bool at_factor_start() const {
        return at_word("t") || at_word("sin") || at_word("cos");
    }

    double parse_number() {
        const char* begin = text_.data() + pos_;
        const char* end = text_.data() + text_.size();
        double value = 0.0;
        auto [ptr, ec] = std::from_chars(begin, end, value);
        if (ec != std::errc{} || ptr == begin) throw ParseError("expected a number", pos_);
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    double parse_cfactor() {
        skip_ws();
        if (at_end()) throw ParseError("expected a number, 'pi' or '('", pos_);
        if (peek() == '(') {
            ++pos_;
            const double v = parse_coeff();
            skip_ws();
            if (at_end() || peek() != ')') throw ParseError("expected ')'", pos_);
            ++pos_;
            return v;
        }
        if (at_word("pi")) {
            pos_ += 2;
            return std::numbers::pi;
        }
        if (at_number_start()) return parse_number();
        throw ParseError("expected a number, 'pi' or '('", pos_);
    }

    double parse_coeff() {
        skip_ws();
        double sign = 1.0;
        if (!at_end() && peek() == '-') {
            sign = -1.0;
            ++pos_;
        }
        double value = sign * parse_cfactor();
        for (;;) {
            skip_ws();
            if (at_end()) break;
            const char op = peek();
            if (op != '*' && op != '/') break;
            // '*' may separate the coefficient from the t/sin/cos factor;
            // only treat it as a product if a numeric factor follows.
            const std::size_t save = pos_;
            ++pos_;
            skip_ws();
            if (op == '*' && !at_cfactor_start()) {
                pos_ = save;
                break;
            }
            const double rhs = parse_cfactor();
            value = (op == '*') ? value * rhs : value / rhs;
        }
        return value;
    }

    int parse_uint() {
        skip_ws();
        if (at_end() || peek() < '0' || peek() > '9')
            throw ParseError("expected a non-negative integer exponent", pos_);
        int value = 0;
        auto [ptr, ec] = std::from_chars(text_.data() + pos_, text_.data() + text_.size(), value);
        if (ec != std::errc{}) throw ParseError("bad integer exponent", pos_);
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    // coeff ["*"] t [sign coeff]  |  t [sign coeff]
    void parse_affine(double& omega, double& phase) {
        skip_ws();
        omega = 1.0;
        phase = 0.0;
        if (at_cfactor_start() || (!at_end() && peek() == '-')) {
            omega = parse_coeff();
            skip_ws();
            if (!at_end() && peek() == '*') {
                ++pos_;
                skip_ws();
            }
        }
        if (!at_word("t")) throw ParseError("expected 't' inside sin/cos argument", pos_);
        ++pos_;
        skip_ws();
        if (!at_end() && (peek() == '+' || peek() == '-')) {
            const double sign = (peek() == '+') ? 1.0 : -1.0;
            ++pos_;
            phase = sign * parse_coeff();
        }
    }

    void parse_factor(double coeff, std::vector<Term>& terms) {
        if (at_word("t")) {
            ++pos_;
            int power = 1;
            skip_ws();
            if (!at_end() && peek() == '^') {
                ++pos_;
                power = parse_uint();
            }
            terms.push_back(PolyTerm{coeff, power});
            return;
        }
        const bool is_sin = at_word("sin");
        const bool is_cos = at_word("cos");
        if (is_sin || is_cos) {
            pos_ += 3;
            skip_ws();
            if (at_end() || peek() != '(') throw ParseError("expected '(' after function name", pos_);
            ++pos_;
            double omega = 0.0, phase = 0.0;
            parse_affine(omega, phase);
            skip_ws();
            if (at_end() || peek() != ')') throw ParseError("expected ')'", pos_);
            ++pos_;
            if (is_sin)
                terms.push_back(SinTerm{coeff, omega, phase});
            else
                terms.push_back(CosTerm{coeff, omega, phase});
            return;
        }
        // A lowercase word that is not t/sin/cos reads as an unknown function.
        if (!at_end() && peek() >= 'a' && peek() <= 'z') {
            std::size_t end = pos_;
            while (end < text_.size() && text_[end] >= 'a' && text_[end] <= 'z') ++end;
            throw ParseError(
                "unsupported function '" + std::string(text_.substr(pos_, end - pos_)) + "'", pos_);
        }
        throw ParseError("expected 't', 'sin(...)' or 'cos(...)'", pos_);
    }

    void parse_term(double sign, std::vector<Term>& terms) {
        skip_ws();
        if (at_factor_start()) {
            parse_factor(sign, terms);
            return;
        }
        // Words other than pi/t/sin/cos surface as "unsupported function".
        if (!at_end() && peek() >= 'a' && peek() <= 'z' && !at_word("pi")) {
            parse_factor(sign, terms);
            return;
        }
        const double coeff = sign * parse_coeff();
        skip_ws();
        if (!at_end() && peek() == '*') {
            ++pos_;
            skip_ws();
            parse_factor(coeff, terms);
            return;
        }
        if (at_factor_start()) {
            parse_factor(coeff, terms);
            return;
        }
        terms.push_back(PolyTerm{coeff, 0});
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace detail

inline TimeFn parse_timefn(std::string_view text) { return detail::TimeFnParser(text).parse(); }

inline std::string TimeFn::render() const {
    if (terms_.empty()) return "0";
    std::string out;
    bool first = true;
    for (const auto& term : terms_) {
        double lead = 0.0;
        std::string body;
        if (const auto* p = std::get_if<PolyTerm>(&term)) {
            lead = p->coeff;
            if (p->power == 1)
                body = "t";
            else if (p->power > 1)
                body = "t^" + std::to_string(p->power);
        } else {
            const bool is_sin = std::holds_alternative<SinTerm>(term);
            const double amp = is_sin ? std::get<SinTerm>(term).amp : std::get<CosTerm>(term).amp;
            const double omega =
                is_sin ? std::get<SinTerm>(term).omega : std::get<CosTerm>(term).omega;
            const double phase =
                is_sin ? std::get<SinTerm>(term).phase : std::get<CosTerm>(term).phase;
            lead = amp;
            body = is_sin ? "sin(" : "cos(";
            if (omega == 1.0)
                body += "t";
            else if (omega == -1.0)
                body += "-t";
            else
                body += detail::format_double(omega) + "*t";
            if (phase != 0.0) {
                body += (phase > 0.0) ? "+" : "-";
                body += detail::format_double(std::abs(phase));
            }
            body += ")";
        }
        const double mag = std::abs(lead);
        if (first) {
            if (lead < 0.0) out += "-";
            first = false;
        } else {
            out += (lead < 0.0) ? " - " : " + ";
        }
        if (body.empty())
            out += detail::format_double(mag);
        else if (mag == 1.0)
            out += body;
        else
            out += detail::format_double(mag) + "*" + body;
    }
    return out;
}

}  // namespace spinloops
