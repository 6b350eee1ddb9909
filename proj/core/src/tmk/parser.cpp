#include "ivy/tmk/parser.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

namespace ivy::tmk {

ParseError::ParseError(std::size_t line, std::size_t column, const std::string& detail,
                       const std::string& source)
    : Error(ErrorCode::kParse, (source.empty() ? std::string() : source + ":") +
                                   std::to_string(line) + ":" + std::to_string(column) + ": " +
                                   detail),
      line_(line),
      column_(column),
      detail_(detail) {}

namespace {

enum class TokenKind { kWord, kString, kOpen, kClose, kEnd };

struct Token {
  TokenKind kind = TokenKind::kEnd;
  std::string text;
  std::size_t line = 1;
  std::size_t column = 1;
};

bool is_word_char(char c) {
  return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
         c == ':' || c == '/';
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  Token next() {
    skip_space_and_comments();
    Token tok;
    tok.line = line_;
    tok.column = column_;
    if (pos_ >= src_.size()) return tok;

    char c = src_[pos_];
    if (c == '{') {
      advance();
      tok.kind = TokenKind::kOpen;
      tok.text = "{";
    } else if (c == '}') {
      advance();
      tok.kind = TokenKind::kClose;
      tok.text = "}";
    } else if (c == '"') {
      tok.kind = TokenKind::kString;
      tok.text = read_string(tok);
    } else if (is_word_char(c)) {
      tok.kind = TokenKind::kWord;
      while (pos_ < src_.size() && is_word_char(src_[pos_])) {
        tok.text.push_back(src_[pos_]);
        advance();
      }
    } else {
      throw ParseError(line_, column_, std::string("unexpected character '") + c + "'");
    }
    return tok;
  }

 private:
  void advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_space_and_comments() {
    while (pos_ < src_.size()) {
      char c = src_[pos_];
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        return;
      }
    }
  }

  static int hex_value(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
  }

  std::string read_string(const Token& start) {
    std::string out;
    advance();  // opening quote
    while (true) {
      if (pos_ >= src_.size()) {
        throw ParseError(start.line, start.column, "unterminated string");
      }
      char c = src_[pos_];
      if (c == '"') {
        advance();
        return out;
      }
      if (c == '\\') {
        std::size_t esc_line = line_, esc_col = column_;
        advance();
        if (pos_ >= src_.size()) throw ParseError(start.line, start.column, "unterminated string");
        char e = src_[pos_];
        advance();
        switch (e) {
          case 'n': out.push_back('\n'); break;
          case 't': out.push_back('\t'); break;
          case 'r': out.push_back('\r'); break;
          case '"': out.push_back('"'); break;
          case '\\': out.push_back('\\'); break;
          case 'x': {
            if (pos_ + 1 >= src_.size() || hex_value(src_[pos_]) < 0 ||
                hex_value(src_[pos_ + 1]) < 0) {
              throw ParseError(esc_line, esc_col, "malformed \\x escape");
            }
            int v = hex_value(src_[pos_]) * 16 + hex_value(src_[pos_ + 1]);
            advance();
            advance();
            out.push_back(static_cast<char>(v));
            break;
          }
          default:
            throw ParseError(esc_line, esc_col, std::string("unknown escape '\\") + e + "'");
        }
        continue;
      }
      out.push_back(c);
      advance();
    }
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t column_ = 1;
};

class Parser {
 public:
  explicit Parser(std::string_view src) : lexer_(src) { tok_ = lexer_.next(); }

  TmkModel parse_file() {
    expect_keyword("skill");
    TmkModel model;
    Token head = tok_;
    model.skill_id = value("skill id");
    expect(TokenKind::kOpen, "'{'");
    bool has_name = false;
    bool has_knowledge = false;
    while (tok_.kind != TokenKind::kClose) {
      Token key = keyword();
      if (key.text == "name") {
        set_once(has_name, key, model.skill_name);
      } else if (key.text == "root") {
        model.root_tasks.push_back(value("root task id"));
      } else if (key.text == "task") {
        model.tasks.push_back(parse_task(key));
      } else if (key.text == "method") {
        model.methods.push_back(parse_method(key));
      } else if (key.text == "knowledge") {
        if (has_knowledge) throw ParseError(key.line, key.column, "duplicate 'knowledge' block");
        has_knowledge = true;
        model.knowledge = parse_knowledge();
      } else {
        unknown(key, "skill");
      }
    }
    expect(TokenKind::kClose, "'}'");
    if (tok_.kind != TokenKind::kEnd) {
      throw ParseError(tok_.line, tok_.column, "unexpected content after skill block");
    }
    if (!has_name) missing(head, "skill '" + model.skill_id + "'", "name");
    return model;
  }

 private:
  Task parse_task(const Token& head) {
    Task task;
    task.task_id = value("task id");
    expect(TokenKind::kOpen, "'{'");
    bool has_name = false, has_goal = false;
    while (tok_.kind != TokenKind::kClose) {
      Token key = keyword();
      if (key.text == "name") set_once(has_name, key, task.name);
      else if (key.text == "goal") set_once(has_goal, key, task.goal);
      else if (key.text == "input") task.inputs.push_back(value("input"));
      else if (key.text == "given") task.givens.push_back(value("given"));
      else if (key.text == "makes") task.makes.push_back(value("makes"));
      else if (key.text == "output") task.outputs.push_back(value("output"));
      else if (key.text == "method") task.method_refs.push_back(value("method id"));
      else unknown(key, "task");
    }
    expect(TokenKind::kClose, "'}'");
    if (!has_goal) missing(head, "task '" + task.task_id + "'", "goal");
    if (!has_name) task.name = task.task_id;
    return task;
  }

  Method parse_method(const Token& head) {
    Method method;
    method.method_id = value("method id");
    expect(TokenKind::kOpen, "'{'");
    bool has_name = false, has_start = false;
    Fsm& fsm = method.organizer;
    while (tok_.kind != TokenKind::kClose) {
      Token key = keyword();
      if (key.text == "name") {
        set_once(has_name, key, method.name);
      } else if (key.text == "start") {
        set_once(has_start, key, fsm.start_state);
      } else if (key.text == "accept") {
        fsm.accepting_states.push_back(value("accepting state id"));
      } else if (key.text == "state") {
        fsm.states.push_back(parse_state());
      } else if (key.text == "transition") {
        Transition t;
        t.from = value("transition source");
        t.condition = value("transition condition");
        t.to = value("transition target");
        fsm.transitions.push_back(std::move(t));
      } else {
        unknown(key, "method");
      }
    }
    expect(TokenKind::kClose, "'}'");
    if (!has_start) missing(head, "method '" + method.method_id + "'", "start");
    if (!has_name) method.name = method.method_id;
    return method;
  }

  State parse_state() {
    State state;
    state.state_id = value("state id");
    expect(TokenKind::kOpen, "'{'");
    bool has_description = false, has_subgoal = false;
    while (tok_.kind != TokenKind::kClose) {
      Token key = keyword();
      if (key.text == "description") {
        set_once(has_description, key, state.description);
      } else if (key.text == "subgoal") {
        std::string goal;
        set_once(has_subgoal, key, goal);
        state.sub_goal = std::move(goal);
      } else {
        unknown(key, "state");
      }
    }
    expect(TokenKind::kClose, "'}'");
    return state;
  }

  Knowledge parse_knowledge() {
    Knowledge k;
    expect(TokenKind::kOpen, "'{'");
    while (tok_.kind != TokenKind::kClose) {
      Token key = keyword();
      if (key.text == "concept") {
        k.concepts.push_back(parse_concept());
      } else if (key.text == "relation") {
        Relation r;
        r.subject = value("relation subject");
        r.relation = value("relation name");
        r.object = value("relation object");
        k.relations.push_back(std::move(r));
      } else if (key.text == "truth") {
        k.ground_truths.push_back(value("ground truth"));
      } else {
        unknown(key, "knowledge");
      }
    }
    expect(TokenKind::kClose, "'}'");
    return k;
  }

  Concept parse_concept() {
    Concept c;
    c.concept_id = value("concept id");
    expect(TokenKind::kOpen, "'{'");
    bool has_name = false;
    while (tok_.kind != TokenKind::kClose) {
      Token key = keyword();
      if (key.text == "name") {
        set_once(has_name, key, c.name);
      } else if (key.text == "property") {
        Property p;
        p.name = value("property name");
        p.semantic_type = value("property type");
        c.properties.push_back(std::move(p));
      } else {
        unknown(key, "concept");
      }
    }
    expect(TokenKind::kClose, "'}'");
    if (!has_name) c.name = c.concept_id;
    return c;
  }

  void set_once(bool& seen, const Token& key, std::string& slot) {
    if (seen) throw ParseError(key.line, key.column, "duplicate field '" + key.text + "'");
    seen = true;
    slot = value(key.text);
  }

  [[noreturn]] static void missing(const Token& at, const std::string& owner,
                                   const std::string& field) {
    throw ParseError(at.line, at.column,
                     owner + " is missing mandatory field '" + field + "'");
  }

  [[noreturn]] static void unknown(const Token& key, const std::string& block) {
    throw ParseError(key.line, key.column,
                     "unknown field '" + key.text + "' in " + block + " block");
  }

  Token keyword() {
    if (tok_.kind == TokenKind::kEnd) {
      throw ParseError(tok_.line, tok_.column, "unexpected end of input, expected '}'");
    }
    if (tok_.kind != TokenKind::kWord) {
      throw ParseError(tok_.line, tok_.column, "expected a field name, found " + describe(tok_));
    }
    Token t = tok_;
    tok_ = lexer_.next();
    return t;
  }

  void expect_keyword(const std::string& word) {
    if (tok_.kind != TokenKind::kWord || tok_.text != word) {
      throw ParseError(tok_.line, tok_.column, "expected '" + word + "', found " + describe(tok_));
    }
    tok_ = lexer_.next();
  }

  std::string value(const std::string& what) {
    if (tok_.kind != TokenKind::kString && tok_.kind != TokenKind::kWord) {
      throw ParseError(tok_.line, tok_.column, "expected " + what + ", found " + describe(tok_));
    }
    std::string v = std::move(tok_.text);
    tok_ = lexer_.next();
    return v;
  }

  void expect(TokenKind kind, const std::string& what) {
    if (tok_.kind != kind) {
      throw ParseError(tok_.line, tok_.column, "expected " + what + ", found " + describe(tok_));
    }
    tok_ = lexer_.next();
  }

  static std::string describe(const Token& t) {
    switch (t.kind) {
      case TokenKind::kEnd: return "end of input";
      case TokenKind::kOpen: return "'{'";
      case TokenKind::kClose: return "'}'";
      case TokenKind::kString: return "string \"" + t.text + "\"";
      case TokenKind::kWord: return "'" + t.text + "'";
    }
    return "token";
  }

  Lexer lexer_;
  Token tok_;
};

std::string quote(const std::string& s) {
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\t': out += "\\t"; break;
      case '\r': out += "\\r"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20 || c == 0x7f) {
          auto u = static_cast<unsigned char>(c);
          out += "\\x";
          out.push_back(kHex[u >> 4]);
          out.push_back(kHex[u & 0xF]);
        } else {
          out.push_back(c);
        }
    }
  }
  out += '"';
  return out;
}

}  // namespace

TmkModel parse_tmk(std::string_view source) {
  Parser parser(source);
  return parser.parse_file();
}

std::string serialize_tmk(const TmkModel& model) {
  std::ostringstream out;
  auto line = [&](int depth, const std::string& key, std::initializer_list<std::string> values) {
    out << std::string(static_cast<std::size_t>(depth) * 2, ' ') << key;
    for (const auto& v : values) out << ' ' << quote(v);
    out << '\n';
  };

  out << "skill " << quote(model.skill_id) << " {\n";
  line(1, "name", {model.skill_name});
  for (const auto& root : model.root_tasks) line(1, "root", {root});

  for (const auto& task : model.tasks) {
    out << "\n  task " << quote(task.task_id) << " {\n";
    line(2, "name", {task.name});
    line(2, "goal", {task.goal});
    for (const auto& v : task.inputs) line(2, "input", {v});
    for (const auto& v : task.givens) line(2, "given", {v});
    for (const auto& v : task.makes) line(2, "makes", {v});
    for (const auto& v : task.outputs) line(2, "output", {v});
    for (const auto& v : task.method_refs) line(2, "method", {v});
    out << "  }\n";
  }

  for (const auto& method : model.methods) {
    const Fsm& fsm = method.organizer;
    out << "\n  method " << quote(method.method_id) << " {\n";
    line(2, "name", {method.name});
    line(2, "start", {fsm.start_state});
    for (const auto& a : fsm.accepting_states) line(2, "accept", {a});
    for (const auto& s : fsm.states) {
      out << "    state " << quote(s.state_id) << " {\n";
      line(3, "description", {s.description});
      if (s.sub_goal) line(3, "subgoal", {*s.sub_goal});
      out << "    }\n";
    }
    for (const auto& t : fsm.transitions) line(2, "transition", {t.from, t.condition, t.to});
    out << "  }\n";
  }

  out << "\n  knowledge {\n";
  for (const auto& c : model.knowledge.concepts) {
    out << "    concept " << quote(c.concept_id) << " {\n";
    line(3, "name", {c.name});
    for (const auto& p : c.properties) line(3, "property", {p.name, p.semantic_type});
    out << "    }\n";
  }
  for (const auto& r : model.knowledge.relations) line(2, "relation", {r.subject, r.relation, r.object});
  for (const auto& g : model.knowledge.ground_truths) line(2, "truth", {g});
  out << "  }\n}\n";
  return out.str();
}

TmkModel load_tmk_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIo, "cannot open model file " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse_tmk(buf.str());
  } catch (const ParseError& e) {
    throw ParseError(e.line(), e.column(), e.detail(), path);
  }
}

}  // namespace ivy::tmk
