#include <gtest/gtest.h>

#include "fixtures.hpp"
#include "mst/metrics.hpp"

using namespace mst;
using namespace fixtures;

namespace {

STypePtr ty(const std::string& s) { return parse_session_type(s); }

std::vector<std::string> printed(const std::vector<STypePtr>& ts) {
  std::vector<std::string> out;
  for (auto& t : ts) out.push_back(to_string(t));
  return out;
}

std::vector<std::string> texts(const std::vector<std::string>& texts) {
  std::vector<std::string> out;
  for (auto& t : texts) out.push_back(to_string(ty(t)));
  return out;
}

}  // namespace

TEST(Dual, End) { EXPECT_EQ(to_string(dual(s_end())), "end"); }

TEST(Dual, OutputBecomesInputWithSamePayload) {
  EXPECT_EQ(to_string(dual(ty("!(!(Int).?(Bool).end).end"))), to_string(ty("?(!(Int).?(Bool).end).end")));
}

TEST(Dual, Involution) {
  auto t = ty("mu t.?(Int).!(Int).t");
  EXPECT_EQ(to_string(dual(dual(t))), to_string(t));
}

TEST(Dual, ChoiceSwaps) {
  auto d = dual(ty("+{a: !(Int).end, b: end}"));
  EXPECT_EQ(d->kind, SType::Kind::Branch);
  EXPECT_EQ(to_string(d), to_string(ty("&{a: ?(Int).end, b: end}")));
}

TEST(TailRecursive, Classification) {
  EXPECT_FALSE(is_tail_recursive(s_end()));
  EXPECT_TRUE(is_tail_recursive(ty("mu t.?(Int).!(Int).t")));
  EXPECT_TRUE(is_tail_recursive(ty("mu t.?(mu s.!(Int).s).t")));
  EXPECT_FALSE(is_tail_recursive(ty("!(Int).mu t.?(Int).t")));
  EXPECT_TRUE(is_tr_unfolding(ty("!(Int).mu t.?(Int).!(Int).t")));
}

TEST(DecomposeOpt, End) { EXPECT_EQ(printed(decompose_opt(s_end())), texts({"end"})); }

TEST(DecomposeOpt, TailRecursiveLoop) {
  EXPECT_EQ(printed(decompose_opt(ty("mu t.?(Int).?(Bool).!(Bool).t"))),
            texts({"mu t.?(Int).t", "mu t.?(Bool).t", "mu t.!(Bool).t"}));
}

TEST(DecomposeOpt, FinitePrefixes) {
  EXPECT_EQ(printed(decompose_opt(ty("!(Int).?(Bool).end"))), texts({"!(Int).end", "?(Bool).end"}));
}

TEST(DecomposeOpt, DelegatedPayloadIsDecomposed) {
  EXPECT_EQ(printed(decompose_opt(ty("!(?(Int).!(Bool).end).end"))),
            texts({"!(?(Int).end, !(Bool).end).end"}));
}

TEST(DecomposeOpt, MathServerBranch) {
  EXPECT_EQ(printed(decompose_opt(ty(kMathServerType))),
            texts({"&{add: ?(?(Int).end, ?(Int).end, !(Int).end).end, neg: ?(?(Int).end, !(Int).end).end}"}));
}

TEST(DecomposeOpt, RejectsNonTailRecursion) {
  EXPECT_THROW(decompose_opt(ty("mu t.?(Int).+{a: t, b: end}")), TypeError);
}

TEST(DecomposeOpt, BaseTypesStay) {
  auto g = decompose_opt(v_int());
  ASSERT_EQ(g.size(), 1u);
  EXPECT_EQ(g[0]->kind, VType::Kind::Int);
}

TEST(DecomposePartial, SkipsLeadingPrefixes) {
  auto loop = printed(decompose_partial(ty("mu t.?(Int).!(Int).t")));
  EXPECT_EQ(loop, texts({"mu t.?(Int).t", "mu t.!(Int).t"}));
  auto inner = "mu t.?(Bool).!(Bool).t";
  auto base = printed(decompose_partial(ty(inner)));
  EXPECT_EQ(printed(decompose_partial(ty(std::string("!(Bool).") + inner))), base);
  EXPECT_EQ(printed(decompose_partial(ty(std::string("?(Bool).!(Bool).") + inner))), base);
}

TEST(DecomposePartial, RejectsFiniteTypes) { EXPECT_ANY_THROW(decompose_partial(ty("!(Int).end"))); }

TEST(DecomposeComposed, End) { EXPECT_EQ(printed(decompose_composed(s_end())), texts({"end"})); }

TEST(DecomposeComposed, TwoPrefixes) {
  EXPECT_EQ(printed(decompose_composed(ty("?(Int).!(Bool).end"))),
            texts({"?(<?(?(<?(Int).end>).end).end>).end", "!(<?(?(<?(Bool).end>).end).end>).end"}));
}

TEST(DecomposeComposed, TailRecursiveLoop) {
  EXPECT_EQ(printed(decompose_composed(ty("mu t.?(Int).!(Int).t"))),
            texts({"mu t.?(<?(?(<?(Int).end>).end).end>).t", "mu t.!(<?(?(<?(Int).end>).end).end>).t"}));
}

TEST(DecomposeEnv, Empty) {
  auto e = decompose_env(TypeEnv{}, Mode::Opt);
  EXPECT_TRUE(e.gamma.empty());
  EXPECT_TRUE(e.delta.empty());
}

TEST(DecomposeEnv, DelegationChannel) {
  TypeEnv env = parse_env("[delta]\nu : !(!(Int).?(Bool).end).end\n");
  auto d = decompose_env(init_env(env), Mode::Opt);
  ASSERT_EQ(d.delta.size(), 1u);
  auto& [n, t] = *d.delta.begin();
  EXPECT_EQ(n.str(), "u@1");
  EXPECT_EQ(to_string(t), to_string(ty("!(!(Int).end, ?(Bool).end).end")));
}

TEST(DecomposeEnv, RecursiveChannel) {
  auto d = decompose_env(init_env(parse_env(kNegateLoopEnv)), Mode::Opt);
  ASSERT_EQ(d.delta.size(), 2u);
  auto r = user_name("r");
  EXPECT_EQ(to_string(d.delta.at(r.with_index(1))), "mu t.?(Int).t");
  EXPECT_EQ(to_string(d.delta.at(r.with_index(2))), "mu t.!(Int).t");
}

TEST(DecomposeEnv, RejectsUnindexed) { EXPECT_ANY_THROW(decompose_env(parse_env(kNegateLoopEnv), Mode::Opt)); }

TEST(IndexFn, Values) {
  EXPECT_EQ(index_fn(ty("mu t.?(Int).!(Int).t")), 1);
  EXPECT_EQ(index_fn(ty("!(Int).mu t.?(Int).!(Int).t")), 2);
}

TEST(IndexFn, IgnoresBoundVariableName) {
  EXPECT_EQ(index_fn(ty("mu t.?(Int).!(Bool).?(Bool).t")), index_fn(ty("mu s.?(Int).!(Bool).?(Bool).s")));
}

TEST(IndexFn, RejectsUnfoldings) { EXPECT_ANY_THROW(index_fn(unfold(ty("mu t.?(Int).!(Bool).t")))); }

TEST(IndexFn, RejectsFiniteTypes) { EXPECT_ANY_THROW(index_fn(ty("!(Int).end"))); }

TEST(Degree, Nil) {
  EXPECT_EQ(degree(p_nil(), Mode::Opt), 1);
  EXPECT_EQ(degree(p_nil(), Mode::Composed), 1);
}

TEST(Degree, Delegation) {
  auto s = source(kDelegation, kDelegationEnv);
  EXPECT_EQ(degree(s.process, Mode::Opt), 9);
  // 12 for the sender, 14 for the receiver, 1 for the composition
  EXPECT_EQ(degree(s.process, Mode::Composed), 27);
}

TEST(Minimal, Examples) {
  EXPECT_TRUE(is_minimal(s_end()));
  EXPECT_FALSE(is_minimal(ty("!(Int).?(Bool).end")));
  EXPECT_TRUE(is_minimal(ty("&{add: ?(?(Int).end, ?(Int).end, !(Int).end).end, neg: ?(?(Int).end, !(Int).end).end}")));
  EXPECT_TRUE(is_minimal(ty("mu t.?(Int).t")));
  EXPECT_FALSE(is_minimal(ty("!(!(Int).?(Int).end).end")));
}

TEST(BlockSize, MatchesDecompositionLength) {
  TypeGen gen(11);
  for (int i = 0; i < 200; ++i) {
    auto t = gen.finite(4, true, false);
    EXPECT_EQ(block_size(t, Mode::Opt), decompose_opt(t).size()) << to_string(t);
    EXPECT_EQ(block_size(t, Mode::Composed), decompose_composed(t).size()) << to_string(t);
    // one component per prefix on the spine, at least one
    EXPECT_EQ(decompose_opt(t).size(), std::max<std::size_t>(1, spine_length(t))) << to_string(t);
  }
}

TEST(TypeEquality, UpToBoundVariableNames) {
  EXPECT_TRUE(type_equal(ty("mu t.?(Int).t"), ty("mu s.?(Int).s")));
  EXPECT_FALSE(type_equal(ty("mu t.?(Int).t"), ty("mu t.!(Int).t")));
}
