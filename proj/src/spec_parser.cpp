#include "pmerge/spec_parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "pmerge/error.hpp"

namespace pmerge {

namespace {

class Parser {
public:
    explicit Parser(std::string_view text) : text_(text) {}

    CopulaModel parse_copula_document() {
        CopulaModel model = model_expr();
        expect_end();
        return model;
    }

    MergeStatistic parse_stat_document() {
        const std::size_t at = skip();
        const std::string name = identifier("statistic name (rmean, simes, cauchy)");
        MergeStatistic stat = Simes{};
        if (name == "simes") {
            stat = Simes{};
        } else if (name == "rmean") {
            expect(':', "':' after rmean");
            RMean m;
            bool have_r = false;
            do {
                const std::size_t key_at = skip();
                const std::string key = identifier("parameter name (r, w)");
                expect('=', "'='");
                if (key == "r") {
                    m.r = number();
                    have_r = true;
                } else if (key == "w") {
                    m.weights = Weights(number_list());
                } else {
                    fail(key_at, "parameter r or w");
                }
            } while (accept(','));
            if (!have_r) fail(pos_, "parameter r");
            stat = std::move(m);
        } else if (name == "cauchy") {
            CauchyCombination c;
            if (accept(':')) {
                const std::size_t key_at = skip();
                if (identifier("parameter name (w)") != "w") fail(key_at, "parameter w");
                expect('=', "'='");
                c.weights = Weights(number_list());
            }
            stat = std::move(c);
        } else {
            fail(at, "statistic name (rmean, simes, cauchy)");
        }
        expect_end();
        return stat;
    }

private:
    [[noreturn]] void fail(std::size_t at, const std::string& expected) const {
        throw ParseError(at, expected, std::string(text_));
    }

    std::size_t skip() {
        while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        return pos_;
    }

    bool peek(char c) {
        skip();
        return pos_ < text_.size() && text_[pos_] == c;
    }

    bool peek_digit() {
        skip();
        return pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]));
    }

    bool accept(char c) {
        if (!peek(c)) return false;
        ++pos_;
        return true;
    }

    void expect(char c, const std::string& what) {
        if (!accept(c)) fail(pos_, what);
    }

    void expect_end() {
        if (skip() != text_.size()) fail(pos_, "end of input");
    }

    std::string identifier(const std::string& what) {
        const std::size_t start = skip();
        while (pos_ < text_.size() && std::isalpha(static_cast<unsigned char>(text_[pos_]))) ++pos_;
        if (pos_ == start) fail(start, what);
        return std::string(text_.substr(start, pos_ - start));
    }

    double number() {
        const std::size_t start = skip();
        const char* first = text_.data() + start;
        const char* last = text_.data() + text_.size();
        if (first != last && *first == '+') ++first;
        double value = 0.0;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr == first) fail(start, "number");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    int integer() {
        const std::size_t start = skip();
        const char* first = text_.data() + start;
        const char* last = text_.data() + text_.size();
        int value = 0;
        const auto [ptr, ec] = std::from_chars(first, last, value);
        if (ec != std::errc() || ptr == first) fail(start, "integer");
        if (ptr != last && (*ptr == '.' || *ptr == 'e' || *ptr == 'E')) fail(start, "integer");
        pos_ = static_cast<std::size_t>(ptr - text_.data());
        return value;
    }

    // a;b;c where ';' continues the list only when a number follows.
    std::vector<double> number_list() {
        std::vector<double> values{number()};
        while (peek(';')) {
            const std::size_t save = pos_;
            ++pos_;
            skip();
            if (pos_ < text_.size() &&
                (std::isdigit(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '.' ||
                 text_[pos_] == '-' || text_[pos_] == '+')) {
                values.push_back(number());
            } else {
                pos_ = save;
                break;
            }
        }
        return values;
    }

    std::vector<int> index_list() {
        std::vector<int> values{integer()};
        while (peek(';')) {
            const std::size_t save = pos_;
            ++pos_;
            if (peek_digit()) {
                values.push_back(integer());
            } else {
                pos_ = save;
                break;
            }
        }
        return values;
    }

    ModelPtr sub_model() { return std::make_shared<const CopulaModel>(model_expr()); }

    CopulaModel model_expr() {
        const std::size_t at = skip();
        const std::string name = identifier("model name");
        if (name == "mix") return mixture();
        if (name == "prod") return product();
        if (name == "groups") return groups();
        if (name == "disc") return discretized();
        expect(':', "':' after model name");
        return leaf(name, at);
    }

    CopulaModel mixture() {
        expect('(', "'(' after mix");
        copula::Mixture m;
        do {
            copula::MixtureComponent c;
            c.weight = number();
            expect('*', "'*' between weight and model");
            c.model = sub_model();
            m.components.push_back(std::move(c));
        } while (accept('+'));
        expect(')', "'+' or ')'");
        return validate(CopulaModel(std::move(m)));
    }

    CopulaModel product() {
        expect('(', "'(' after prod");
        copula::Product m;
        do {
            m.factors.push_back(sub_model());
        } while (accept('|'));
        expect(')', "'|' or ')'");
        return validate(CopulaModel(std::move(m)));
    }

    CopulaModel groups() {
        expect('(', "'(' after groups");
        copula::ComonotoneGroups m;
        std::size_t at = skip();
        if (identifier("'base'") != "base") fail(at, "'base'");
        expect('=', "'='");
        m.base = sub_model();
        expect(';', "';' before sizes");
        at = skip();
        if (identifier("'sizes'") != "sizes") fail(at, "'sizes'");
        expect('=', "'='");
        do {
            m.sizes.push_back(integer());
        } while (accept(','));
        expect(')', "',' or ')'");
        return validate(CopulaModel(std::move(m)));
    }

    CopulaModel discretized() {
        expect('(', "'(' after disc");
        copula::Discretized m;
        const std::size_t at = skip();
        if (identifier("'m'") != "m") fail(at, "'m'");
        expect('=', "'='");
        m.m = integer();
        expect(';', "';' before base model");
        m.base = sub_model();
        expect(')', "')'");
        return validate(CopulaModel(std::move(m)));
    }

    struct Value {
        std::size_t position = 0;
        double number = 0.0;
        int integer = 0;
        std::vector<int> indices;
        std::vector<copula::ExtremalComponent> components;
    };

    std::vector<copula::ExtremalComponent> extremal_components() {
        std::vector<copula::ExtremalComponent> out;
        do {
            expect('(', "'(' opening an index set");
            copula::ExtremalComponent c;
            c.J = index_list();
            expect(')', "';' or ')'");
            expect('@', "'@' before component weight");
            c.weight = number();
            out.push_back(std::move(c));
        } while (peek('+') && next_nonspace_after_plus_is('('));
        return out;
    }

    // Consumes the '+' when the following token is `c`; used to tell an
    // exmix component separator from a mixture separator.
    bool next_nonspace_after_plus_is(char c) {
        const std::size_t save = pos_;
        ++pos_;
        if (peek(c)) return true;
        pos_ = save;
        return false;
    }

    CopulaModel leaf(const std::string& name, std::size_t name_at) {
        static const std::map<std::string, std::vector<std::string>> keys = {
            {"indep", {"n"}},           {"comonotone", {"n"}},
            {"gauss", {"n", "rho", "corr"}}, {"t", {"n", "rho", "df"}},
            {"clayton", {"n", "t"}},    {"gumbel", {"n", "theta"}},
            {"extremal", {"n", "J"}},   {"exmix", {"n", "comp"}},
            {"exA", {"n", "beta"}},     {"exB", {"n", "beta"}},
        };
        const auto family = keys.find(name);
        if (family == keys.end()) {
            fail(name_at, "model name (indep, comonotone, gauss, t, clayton, gumbel, extremal, exmix, "
                          "exA, exB, mix, prod, groups, disc)");
        }
        std::map<std::string, Value> params;
        do {
            const std::size_t at = skip();
            const std::string key = identifier("parameter name");
            const auto& allowed = family->second;
            if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
                std::string list;
                for (const auto& k : allowed) list += (list.empty() ? "" : ", ") + k;
                fail(at, "parameter of " + name + " (" + list + ")");
            }
            if (params.count(key)) fail(at, "parameter not already given");
            expect('=', "'='");
            Value v;
            v.position = skip();
            if (key == "n") {
                v.integer = integer();
            } else if (key == "J") {
                v.indices = index_list();
            } else if (key == "comp") {
                v.components = extremal_components();
            } else {
                v.number = number();
            }
            params.emplace(key, std::move(v));
        } while (accept(','));

        auto require = [&](const std::string& key) -> const Value& {
            const auto it = params.find(key);
            if (it == params.end()) fail(pos_, "parameter " + key + " for " + name);
            return it->second;
        };
        const int n = require("n").integer;

        CopulaModel model = copula::Independence{n};
        if (name == "indep") {
            model = copula::Independence{n};
        } else if (name == "comonotone") {
            model = copula::Comonotone{n};
        } else if (name == "gauss") {
            const bool has_rho = params.count("rho") > 0;
            const bool has_corr = params.count("corr") > 0;
            if (has_rho == has_corr) fail(pos_, "exactly one of rho or corr for gauss");
            model = has_rho ? copula::GaussEquicorr{n, params["rho"].number}
                            : copula::GaussEquicorr::with_pairwise_correlation(n, params["corr"].number);
        } else if (name == "t") {
            const double df = params.count("df") ? params["df"].number : 4.0;
            model = copula::TEquicorr{n, require("rho").number, df};
        } else if (name == "clayton") {
            model = copula::Clayton{n, require("t").number};
        } else if (name == "gumbel") {
            model = copula::Gumbel{n, require("theta").number};
        } else if (name == "extremal") {
            model = copula::Extremal{n, require("J").indices};
        } else if (name == "exmix") {
            model = copula::ExtremalMixture{n, require("comp").components};
        } else if (name == "exA") {
            model = copula::BlockExampleA{n, require("beta").number};
        } else {
            model = copula::BlockExampleB{n, require("beta").number};
        }
        return validate(model);
    }

    std::string_view text_;
    std::size_t pos_ = 0;
};

} // namespace

CopulaModel parse_copula_spec(std::string_view text) { return Parser(text).parse_copula_document(); }

MergeStatistic parse_stat_spec(std::string_view text) { return Parser(text).parse_stat_document(); }

} // namespace pmerge
