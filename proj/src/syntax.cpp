#include "mst/syntax.hpp"

#include <cctype>
#include <sstream>

namespace mst {

namespace {

struct Token {
  enum class Kind { Ident, Number, Sym, End };
  Kind kind;
  std::string text;
  int line, col;
};

std::vector<Token> lex(const std::string& src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto adv = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    char ch = src[i];
    if (std::isspace(static_cast<unsigned char>(ch))) {
      adv(1);
      continue;
    }
    if (ch == '%' || (ch == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') adv(1);
      continue;
    }
    Token t{Token::Kind::Sym, "", line, col};
    if (std::isalpha(static_cast<unsigned char>(ch)) || ch == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_' || src[j] == '\''))
        ++j;
      t.kind = Token::Kind::Ident;
      t.text = src.substr(i, j - i);
      adv(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(ch))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Number;
      t.text = src.substr(i, j - i);
      adv(j - i);
    } else if (src.compare(i, 2, "-o") == 0 || src.compare(i, 2, "->") == 0) {
      t.text = src.substr(i, 2);
      adv(2);
    } else {
      static const std::string syms = "!?().,|+&{}:~@#<>;*-";
      if (syms.find(ch) == std::string::npos) {
        throw SyntaxError("unexpected character '" + std::string(1, ch) + "' at " + std::to_string(line) + ":" +
                          std::to_string(col));
      }
      t.text = std::string(1, ch);
      adv(1);
    }
    out.push_back(t);
  }
  out.push_back(Token{Token::Kind::End, "<end of input>", line, col});
  return out;
}

bool reserved_user_ident(const std::string& s) {
  if (s.empty()) return false;
  if (s[0] == '_') return true;
  if (s == "c" || s == "cr") return true;
  auto digits_from = [&](std::size_t k) {
    if (k >= s.size()) return false;
    for (std::size_t j = k; j < s.size(); ++j)
      if (!std::isdigit(static_cast<unsigned char>(s[j]))) return false;
    return true;
  };
  if (s[0] == 'c' && digits_from(1)) return true;
  if (s.rfind("cr", 0) == 0 && (digits_from(2) || (s.size() > 2 && std::isupper(static_cast<unsigned char>(s[2])))))
    return true;
  return false;
}

const std::set<std::string> kKeywords = {"new", "rec", "mu", "end", "succ", "true", "false", "Int", "Bool"};

class Parser {
 public:
  Parser(const std::string& src, ParseOptions o) : toks_(lex(src)), opts_(o) {}

  ProcPtr process_top() {
    auto p = par();
    expect_end();
    return p;
  }
  STypePtr session_top() {
    auto s = session();
    expect_end();
    return s;
  }
  VTypePtr vtype_top() {
    auto v = value_type();
    expect_end();
    return v;
  }
  ValuePtr value_top() {
    auto v = expr();
    expect_end();
    return v;
  }
  Name name_top() {
    auto n = channel();
    expect_end();
    return n;
  }

 private:
  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  ParseOptions opts_;
  std::vector<Name> bound_;  // for kind classification
  std::vector<bool> bound_shared_;
  std::vector<std::string> recvars_;
  int rep_counter_ = 0;

  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }
  bool is(const std::string& sym, std::size_t k = 0) const {
    const auto& t = peek(k);
    return t.kind == Token::Kind::Sym && t.text == sym;
  }
  bool is_kw(const std::string& kw, std::size_t k = 0) const {
    const auto& t = peek(k);
    return t.kind == Token::Kind::Ident && t.text == kw;
  }
  [[noreturn]] void fail(const std::string& msg) const {
    const auto& t = peek();
    throw SyntaxError("syntax error at " + std::to_string(t.line) + ":" + std::to_string(t.col) + ": " + msg +
                      " (found '" + t.text + "')");
  }
  void expect(const std::string& sym) {
    if (!is(sym)) fail("expected '" + sym + "'");
    ++pos_;
  }
  bool accept(const std::string& sym) {
    if (!is(sym)) return false;
    ++pos_;
    return true;
  }
  void expect_end() {
    if (peek().kind != Token::Kind::End) fail("unexpected trailing input");
  }
  std::string ident() {
    if (peek().kind != Token::Kind::Ident) fail("expected identifier");
    return toks_[pos_++].text;
  }
  int number() {
    if (peek().kind != Token::Kind::Number) fail("expected number");
    return std::stoi(toks_[pos_++].text);
  }

  // ----- names

  Name channel() {
    bool dual = accept("~");
    if (peek().kind != Token::Kind::Ident) fail("expected channel name");
    const Token& start = peek();
    std::string id = ident();
    Name n;
    n.dual = dual;
    if (opts_.generated && (id == "c" || id == "cr" || id == "crX") && is("@")) {
      expect("@");
      if (id == "c") {
        n.kind = NameKind::PropLin;
        n.index = number();
      } else if (id == "cr") {
        n.kind = NameKind::PropRec;
        if (peek().kind == Token::Kind::Number)
          n.index = number();
        else
          n.base = ident();
      } else {
        n.kind = NameKind::PropRecVar;
        n.base = ident();
      }
      n.generated = true;
    } else {
      if (!opts_.generated && (reserved_user_ident(id) || kKeywords.count(id))) {
        throw SyntaxError("syntax error at " + std::to_string(start.line) + ":" + std::to_string(start.col) +
                          ": reserved identifier '" + id + "' in user input");
      }
      if (!id.empty() && id[0] == '_') {
        n.generated = true;
        id = id.substr(1);
        if (id.empty()) fail("empty generated name");
      }
      n.base = id;
      if (accept("@")) {
        n.index = number();
        if (n.index < 1) fail("index must be positive");
      }
    }
    if (is("#")) {
      if (!opts_.generated) fail("serial numbers are not allowed in user input");
      expect("#");
      n.serial = number();
    }
    classify(n);
    return n;
  }

  void classify(Name& n) {
    if (n.is_propagator()) return;
    for (std::size_t i = bound_.size(); i-- > 0;) {
      if (bound_[i].plain() == n.plain()) {
        n.kind = bound_[i].kind;
        return;
      }
    }
    n.kind = NameKind::Session;
  }

  Name binder() {
    Name n;
    if (opts_.generated) {
      n = channel();
    } else {
      if (is("~")) fail("binders cannot be dual names");
      std::string id = ident();
      if (reserved_user_ident(id) || kKeywords.count(id)) fail("reserved identifier '" + id + "'");
      if (is("@")) fail("binders cannot be indexed");
      n.base = id;
    }
    if (!n.is_propagator()) n.kind = NameKind::Variable;
    return n;
  }

  // ----- processes

  ProcPtr par() {
    std::vector<ProcPtr> parts{prefix_level()};
    while (accept("|")) parts.push_back(prefix_level());
    return p_par(parts);
  }

  bool channel_op_follows() const {
    // identifier [@ k] [# n] followed by ! ? + &
    std::size_t k = 0;
    if (is("~", k)) ++k;
    if (peek(k).kind != Token::Kind::Ident) return false;
    ++k;
    if (is("@", k)) k += 2;
    if (is("#", k)) k += 2;
    return is("!", k) || is("?", k) || is("+", k) || is("&", k);
  }

  ProcPtr prefix_level() {
    if (peek().kind == Token::Kind::Number && peek().text == "0") {
      ++pos_;
      return p_nil();
    }
    if (accept("*")) {
      std::string x = "Rep" + std::to_string(++rep_counter_);
      while (std::find(recvars_.begin(), recvars_.end(), x) != recvars_.end()) x += "'";
      recvars_.push_back(x);
      auto body = prefix_level();
      recvars_.pop_back();
      return p_rec(x, p_par(body, p_var(x)));
    }
    if (is("(") && is_kw("new", 1)) {
      pos_ += 2;
      Name n = binder();
      if (n.dual) fail("restricted names are written without '~'");
      std::optional<VTypePtr> annot;
      if (accept(":")) annot = value_type();
      expect(")");
      if (!n.is_propagator())
        n.kind = annot && (*annot)->kind == VType::Kind::Shared ? NameKind::Shared : NameKind::Session;
      bound_.push_back(n);
      auto body = prefix_level();
      bound_.pop_back();
      return p_res(n, annot, body);
    }
    if (accept("(")) {
      auto p = par();
      expect(")");
      return p;
    }
    if (is_kw("rec")) {
      ++pos_;
      std::string x = ident();
      expect(".");
      recvars_.push_back(x);
      auto body = prefix_level();
      recvars_.pop_back();
      return p_rec(x, body);
    }
    if (channel_op_follows()) return action();
    if (peek().kind == Token::Kind::Ident && !kKeywords.count(peek().text)) {
      return p_var(ident());
    }
    fail("expected a process");
  }

  ProcPtr continuation() {
    if (accept(".")) return prefix_level();
    return p_nil();
  }

  ProcPtr action() {
    Name subj = channel();
    if (accept("!")) {
      expect("(");
      std::vector<ValuePtr> vs;
      if (!is(")")) {
        vs.push_back(expr());
        while (accept(",")) vs.push_back(expr());
      }
      expect(")");
      return p_out(subj, std::move(vs), continuation());
    }
    if (accept("?")) {
      expect("(");
      std::vector<Name> bs;
      if (!is(")")) {
        bs.push_back(binder());
        while (accept(",")) bs.push_back(binder());
      }
      expect(")");
      for (auto& b : bs) bound_.push_back(b);
      auto c = continuation();
      bound_.resize(bound_.size() - bs.size());
      return p_in(subj, std::move(bs), c);
    }
    if (accept("+")) {
      std::string l = ident();
      return p_sel(subj, l, continuation());
    }
    expect("&");
    expect("{");
    std::vector<std::pair<std::string, ProcPtr>> bs;
    do {
      std::string l = ident();
      expect(":");
      bs.emplace_back(l, par());
    } while (accept(","));
    expect("}");
    return p_bra(subj, std::move(bs));
  }

  // ----- values

  ValuePtr expr() {
    ValuePtr v = unary();
    while (accept("+")) v = v_add(v, unary());
    return v;
  }

  ValuePtr unary() {
    if (accept("-")) {
      if (peek().kind == Token::Kind::Number) return v_num(-static_cast<long long>(std::stoll(toks_[pos_++].text)));
      return v_neg(unary());
    }
    if (is_kw("succ")) {
      ++pos_;
      return v_succ(unary());
    }
    return atom();
  }

  ValuePtr atom() {
    if (peek().kind == Token::Kind::Number) return v_num(std::stoll(toks_[pos_++].text));
    if (is_kw("true")) {
      ++pos_;
      return v_boolean(true);
    }
    if (is_kw("false")) {
      ++pos_;
      return v_boolean(false);
    }
    if (accept("(")) {
      auto v = expr();
      expect(")");
      return v;
    }
    return v_name(channel());
  }

  // ----- types

  VTypePtr value_type() {
    if (is_kw("Int")) {
      ++pos_;
      return v_int();
    }
    if (is_kw("Bool")) {
      ++pos_;
      return v_bool();
    }
    if (accept("<")) {
      std::vector<VTypePtr> items;
      if (!is(">")) {
        append_flat(items, value_type());
        while (accept(",")) append_flat(items, value_type());
      }
      expect(">");
      return v_shared(std::move(items));
    }
    if (is("(")) {
      // parenthesized tuple or a single type; tuples flatten into payloads
      ++pos_;
      std::vector<VTypePtr> items;
      append_flat(items, value_type());
      while (accept(",")) append_flat(items, value_type());
      expect(")");
      if (accept("->") || accept("-o")) {
        bool linear = toks_[pos_ - 1].text == "-o";
        expect("*");
        return v_arrow(std::move(items), linear);
      }
      if (items.size() == 1) return items[0];
      tuple_buffer_ = std::move(items);
      return nullptr;
    }
    return v_session(session());
  }

  std::vector<VTypePtr> tuple_buffer_;

  void append_flat(std::vector<VTypePtr>& out, VTypePtr v) {
    if (!v) {
      for (auto& x : tuple_buffer_) out.push_back(x);
      tuple_buffer_.clear();
    } else {
      out.push_back(std::move(v));
    }
  }

  std::vector<VTypePtr> payload() {
    std::vector<VTypePtr> items;
    if (accept("(")) {
      if (!is(")")) {
        append_flat(items, value_type());
        while (accept(",")) append_flat(items, value_type());
      }
      expect(")");
      return items;
    }
    // single unparenthesized atomic payload
    if (is_kw("Int") || is_kw("Bool") || is("<") || is_kw("end")) {
      items.push_back(value_type());
      return items;
    }
    fail("expected a payload type");
  }

  STypePtr session() {
    if (is_kw("end")) {
      ++pos_;
      return s_end();
    }
    if (is_kw("mu") || is_kw("rec")) {
      ++pos_;
      std::string t = ident();
      expect(".");
      return s_rec(t, session());
    }
    if (is("!") || is("?")) {
      bool out = toks_[pos_++].text == "!";
      auto p = payload();
      if (!accept(".") && !accept(";")) fail("expected '.' or ';' after a payload");
      auto c = session();
      return out ? s_out(std::move(p), c) : s_in(std::move(p), c);
    }
    if (is("&") || is("+")) {
      bool branch = toks_[pos_++].text == "&";
      expect("{");
      std::vector<std::pair<std::string, STypePtr>> bs;
      do {
        std::string l = ident();
        expect(":");
        bs.emplace_back(l, session());
      } while (accept(","));
      expect("}");
      return branch ? s_branch(std::move(bs)) : s_select(std::move(bs));
    }
    if (accept("(")) {
      auto s = session();
      expect(")");
      return s;
    }
    if (peek().kind == Token::Kind::Ident && !kKeywords.count(peek().text)) return s_var(ident());
    fail("expected a session type");
  }
};

// ----- printing

void print_v(std::ostream& os, const ValuePtr& v, bool nested);
void print_p(std::ostream& os, const ProcPtr& p);

void print_prefix_cont(std::ostream& os, const ProcPtr& p) {
  if (p->kind == Proc::Kind::Par) {
    os << '(';
    print_p(os, p);
    os << ')';
  } else {
    print_p(os, p);
  }
}

void print_v(std::ostream& os, const ValuePtr& v, bool nested) {
  switch (v->kind) {
    case Value::Kind::Name: os << v->name.str(); break;
    case Value::Kind::Int:
      if (v->num < 0)
        os << '-' << -v->num;
      else
        os << v->num;
      break;
    case Value::Kind::Bool: os << (v->num ? "true" : "false"); break;
    case Value::Kind::Neg:
      os << "-";
      if (v->lhs->kind == Value::Kind::Int) {
        os << '(';
        print_v(os, v->lhs, false);
        os << ')';
      } else {
        print_v(os, v->lhs, true);
      }
      break;
    case Value::Kind::Succ:
      os << "succ ";
      print_v(os, v->lhs, true);
      break;
    case Value::Kind::Add:
      if (nested) os << '(';
      print_v(os, v->lhs, false);
      os << " + ";
      print_v(os, v->rhs, true);
      if (nested) os << ')';
      break;
    case Value::Kind::Abs:
      os << "lam(" << print_names(v->binders) << ").(";
      print_p(os, v->body);
      os << ')';
      break;
  }
}

void print_p(std::ostream& os, const ProcPtr& p) {
  switch (p->kind) {
    case Proc::Kind::Nil: os << '0'; break;
    case Proc::Kind::Var: os << p->label; break;
    case Proc::Kind::Out:
      os << p->subject.str() << "!(";
      for (std::size_t i = 0; i < p->payload.size(); ++i) {
        if (i) os << ", ";
        print_v(os, p->payload[i], false);
      }
      os << ").";
      print_prefix_cont(os, p->cont);
      break;
    case Proc::Kind::In:
      os << p->subject.str() << "?(" << print_names(p->binders) << ").";
      print_prefix_cont(os, p->cont);
      break;
    case Proc::Kind::Sel:
      os << p->subject.str() << '+' << p->label << '.';
      print_prefix_cont(os, p->cont);
      break;
    case Proc::Kind::Bra:
      os << p->subject.str() << "&{";
      for (std::size_t i = 0; i < p->branches.size(); ++i) {
        if (i) os << ", ";
        os << p->branches[i].first << ": ";
        print_p(os, p->branches[i].second);
      }
      os << '}';
      break;
    case Proc::Kind::Res:
      os << "(new " << p->subject.str();
      if (p->annot) os << " : " << to_string(*p->annot);
      os << ") ";
      print_prefix_cont(os, p->cont);
      break;
    case Proc::Kind::Par:
      if (p->cont->kind == Proc::Kind::Par) {
        os << '(';
        print_p(os, p->cont);
        os << ')';
      } else {
        print_p(os, p->cont);
      }
      os << " | ";
      print_p(os, p->right);
      break;
    case Proc::Kind::Rec:
      os << "rec " << p->label << '.';
      print_prefix_cont(os, p->cont);
      break;
    case Proc::Kind::App:
      os << "app(";
      print_v(os, p->fun, false);
      os << "; ";
      for (std::size_t i = 0; i < p->payload.size(); ++i) {
        if (i) os << ", ";
        print_v(os, p->payload[i], false);
      }
      os << ')';
      break;
  }
}

}  // namespace

ProcPtr parse_process(const std::string& text, ParseOptions opts) { return Parser(text, opts).process_top(); }
STypePtr parse_session_type(const std::string& text) { return Parser(text, {}).session_top(); }
VTypePtr parse_value_type(const std::string& text) {
  auto v = Parser(text, {}).vtype_top();
  if (!v) throw SyntaxError("a tuple is not a value type: " + text);
  return v;
}
ValuePtr parse_value(const std::string& text, ParseOptions opts) { return Parser(text, opts).value_top(); }
Name parse_name(const std::string& text, ParseOptions opts) { return Parser(text, opts).name_top(); }

std::string print_process(const ProcPtr& p) {
  std::ostringstream os;
  print_p(os, p);
  return os.str();
}

std::string print_value(const ValuePtr& v) {
  std::ostringstream os;
  print_v(os, v, false);
  return os.str();
}

std::string print_names(const std::vector<Name>& ns) {
  std::string s;
  for (std::size_t i = 0; i < ns.size(); ++i) {
    if (i) s += ", ";
    s += ns[i].str();
  }
  return s;
}

}  // namespace mst
