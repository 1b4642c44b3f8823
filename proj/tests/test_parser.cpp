#include <doctest.h>

#include <string>

#include "pmerge/error.hpp"
#include "pmerge/spec_parser.hpp"

using namespace pmerge;

namespace {

std::size_t error_position(const std::string& text) {
    try {
        parse_copula_spec(text);
    } catch (const ParseError& e) {
        return e.position();
    }
    return std::string::npos;
}

} // namespace

TEST_SUITE("spec parser") {

TEST_CASE("every documented copula spec parses") {
    CHECK(parse_copula_spec("indep:n=10").get_if<copula::Independence>()->n == 10);
    CHECK(parse_copula_spec("comonotone:n=10").dimension() == 10);
    CHECK(parse_copula_spec("gauss:n=10,rho=0.3").get_if<copula::GaussEquicorr>()->rho == 0.3);
    CHECK(parse_copula_spec("gauss:n=10,corr=0.09").get_if<copula::GaussEquicorr>()->rho ==
          doctest::Approx(0.3).epsilon(1e-15));
    const auto t = parse_copula_spec("t:n=10,rho=0.3,df=4");
    CHECK(t.get_if<copula::TEquicorr>()->df == 4.0);
    CHECK(parse_copula_spec("t:n=3,rho=0.3").get_if<copula::TEquicorr>()->df == 4.0);
    CHECK(parse_copula_spec("clayton:n=10,t=1.5").get_if<copula::Clayton>()->t == 1.5);
    CHECK(parse_copula_spec("gumbel:n=10,theta=2").get_if<copula::Gumbel>()->theta == 2.0);
    CHECK(parse_copula_spec("extremal:n=3,J=1;3").get_if<copula::Extremal>()->J == std::vector<int>{1, 3});
    const auto em = parse_copula_spec("exmix:n=3,comp=(1;3)@0.4+(1)@0.6");
    CHECK(em.get_if<copula::ExtremalMixture>()->components.size() == 2);
    CHECK(parse_copula_spec("exA:n=10,beta=0.5").get_if<copula::BlockExampleA>()->beta == 0.5);
    CHECK(parse_copula_spec("exB:n=10,beta=0.5").get_if<copula::BlockExampleB>());
    const auto mix = parse_copula_spec("mix(0.3*clayton:n=5,t=1 + 0.7*indep:n=5)");
    CHECK(mix.get_if<copula::Mixture>()->components.size() == 2);
    CHECK(mix.dimension() == 5);
    CHECK(parse_copula_spec("prod(clayton:n=3,t=1 | indep:n=2)").dimension() == 5);
    CHECK(parse_copula_spec("groups(base=indep:n=3; sizes=2,2,1)").dimension() == 5);
    CHECK(parse_copula_spec("disc(m=50; indep:n=10)").get_if<copula::Discretized>()->m == 50);
}

TEST_CASE("whitespace is insignificant and nesting works") {
    const auto a = parse_copula_spec("  prod ( mix( 0.5 * extremal : n = 2 , J = 1 ; 2 + 0.5*indep:n=2 ) | "
                                     "disc( m = 3 ; groups(base=clayton:n=2,t=2; sizes=1,2) ) )  ");
    CHECK(a.dimension() == 5);
    const auto b = parse_copula_spec("mix(0.5*exmix:n=3,comp=(1;2)@0.5+(1;2;3)@0.5 + 0.5*indep:n=3)");
    CHECK(b.get_if<copula::Mixture>()->components.size() == 2);
    const auto c = parse_copula_spec("groups(base=extremal:n=2,J=1;2; sizes=2,1)");
    CHECK(c.dimension() == 3);
}

TEST_CASE("malformed specs report position and expected token") {
    CHECK(error_position("clayton:n=5,x=1") == 12);
    CHECK(error_position("clayton n=5") == 8);
    CHECK(error_position("clayton:n=5.5,t=1") == 10);
    CHECK(error_position("bogus:n=1") == 0);
    CHECK(error_position("mix(0.5*indep:n=2 0.5*indep:n=2)") == 18);
    CHECK(error_position("indep:n=2 trailing") == 10);
    CHECK(error_position("clayton:n=5") == 11);
    CHECK(error_position("clayton:n=5,n=6,t=1") == 12);
    try {
        parse_copula_spec("gumbel:n=3,theta=");
        FAIL("expected a parse error");
    } catch (const ParseError& e) {
        CHECK(e.expected() == "number");
        CHECK(std::string(e.what()).find("position 17") != std::string::npos);
    }
}

TEST_CASE("well-formed specs with bad parameters raise domain errors") {
    CHECK_THROWS_AS(parse_copula_spec("clayton:n=5,t=-1"), DomainError);
    CHECK_THROWS_AS(parse_copula_spec("gumbel:n=5,theta=0.5"), DomainError);
    CHECK_THROWS_AS(parse_copula_spec("gauss:n=5,rho=2"), DomainError);
    CHECK_THROWS_AS(parse_copula_spec("disc(m=1; indep:n=2)"), DomainError);
    CHECK_THROWS_AS(parse_copula_spec("mix(0.5*indep:n=2 + 0.5*indep:n=3)"), ShapeError);
    CHECK_THROWS_AS(parse_copula_spec("mix(0.5*indep:n=2 + 0.6*indep:n=2)"), DomainError);
    try {
        parse_copula_spec("clayton:n=5,t=-1");
    } catch (const DomainError& e) {
        CHECK(std::string(e.what()).find("t = -1") != std::string::npos);
    }
}

TEST_CASE("statistic specs") {
    const auto r = parse_stat_spec("rmean:r=-1");
    CHECK(std::get<RMean>(r).r == -1.0);
    CHECK(!std::get<RMean>(r).weights);
    const auto rw = parse_stat_spec(" rmean : r = -2 , w = 0.25;0.75 ");
    CHECK(std::get<RMean>(rw).weights->size() == 2);
    CHECK(std::holds_alternative<Simes>(parse_stat_spec("simes")));
    CHECK(std::holds_alternative<CauchyCombination>(parse_stat_spec("cauchy")));
    CHECK(std::get<CauchyCombination>(parse_stat_spec("cauchy:w=0.5;0.5")).weights->size() == 2);
    CHECK_THROWS_AS(parse_stat_spec("rmean"), ParseError);
    CHECK_THROWS_AS(parse_stat_spec("rmean:w=1"), ParseError);
    CHECK_THROWS_AS(parse_stat_spec("median"), ParseError);
    CHECK_THROWS_AS(parse_stat_spec("simes:r=1"), ParseError);
    CHECK_THROWS_AS(parse_stat_spec("cauchy:w=0.5;0.6"), DomainError);
}

} // TEST_SUITE
