#ifndef PMERGE_SPEC_PARSER_HPP
#define PMERGE_SPEC_PARSER_HPP

#include <string_view>

#include "pmerge/copula.hpp"
#include "pmerge/merge.hpp"

namespace pmerge {

/// Parses a copula specification such as
///
///   indep:n=10                         comonotone:n=10
///   gauss:n=10,rho=0.3                 gauss:n=10,corr=0.09
///   t:n=10,rho=0.3,df=4                clayton:n=10,t=1.5
///   gumbel:n=10,theta=2                extremal:n=3,J=1;3
///   exmix:n=3,comp=(1;3)@0.4+(1)@0.6   exA:n=10,beta=0.5   exB:n=10,beta=0.5
///   mix(0.3*clayton:n=5,t=1 + 0.7*indep:n=5)
///   prod(clayton:n=3,t=1 | indep:n=2)
///   groups(base=indep:n=3; sizes=2,2,1)
///   disc(m=50; indep:n=10)
///
/// Whitespace is ignored. Returns the validated model. Throws ParseError
/// (with position and expected token) for malformed text and DomainError or
/// ShapeError for well-formed text with invalid parameters.
CopulaModel parse_copula_spec(std::string_view text);

/// Parses a statistic specification: `rmean:r=-1`, `rmean:r=-2,w=0.5;0.25;0.25`,
/// `simes`, `cauchy`, `cauchy:w=0.2;0.8`.
MergeStatistic parse_stat_spec(std::string_view text);

} // namespace pmerge

#endif // PMERGE_SPEC_PARSER_HPP
