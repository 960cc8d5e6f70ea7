#include "spatial/taxonomy.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <memory>
#include <regex>
#include <sstream>
#include <vector>

#include "spatial/errors.hpp"

namespace spatial {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(), [](unsigned char c) { return std::tolower(c); });
  return out;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r\n");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(first, last - first + 1));
}

// ---- plain line format ------------------------------------------------------

Taxonomy parse_lines(std::string_view text) {
  Taxonomy tax;
  std::size_t pos = 0;
  int line_no = 0;
  while (pos <= text.size()) {
    const auto end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    ++line_no;
    pos = end + 1;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);

    // Split into whitespace-separated words, remembering their columns.
    std::vector<std::pair<std::string, int>> words;
    for (std::size_t i = 0; i < line.size();) {
      if (std::isspace(static_cast<unsigned char>(line[i]))) {
        ++i;
        continue;
      }
      const std::size_t start = i;
      while (i < line.size() && !std::isspace(static_cast<unsigned char>(line[i]))) ++i;
      words.emplace_back(std::string(line.substr(start, i - start)), static_cast<int>(start) + 1);
    }
    if (words.empty()) continue;

    const std::string& name = words[0].first;
    if (words.size() == 1) {
      tax.add_class(name);
      continue;
    }
    const std::string& keyword = words[1].first;
    const SourceLocation where{line_no, words[1].second};
    if (keyword == "subClassOf") {
      if (words.size() != 3) throw ParseError(where, "expected 'Class subClassOf Parent'");
      tax.add_parent(name, words[2].first);
    } else if (keyword == "label") {
      if (words.size() < 3) throw ParseError(where, "label needs a synonym");
      const auto from = static_cast<std::size_t>(words[2].second - 1);
      tax.add_synonym(name, trim(line.substr(from)));
    } else {
      throw ParseError(where, "unknown keyword '" + keyword + "' (expected subClassOf or label)");
    }
  }
  return tax;
}

// ---- RDF/XML subset ---------------------------------------------------------

struct Element {
  std::string name;
  std::vector<std::pair<std::string, std::string>> attributes;
  std::vector<std::unique_ptr<Element>> children;
  std::string text;
  SourceLocation where;

  const std::string* attribute(std::string_view key) const {
    for (const auto& [k, v] : attributes) {
      if (k == key) return &v;
    }
    return nullptr;
  }
};

class XmlReader {
 public:
  explicit XmlReader(std::string_view text) : text_(text) {}

  std::vector<std::unique_ptr<Element>> parse() {
    std::vector<std::unique_ptr<Element>> roots;
    std::vector<Element*> stack;
    while (pos_ < text_.size()) {
      if (peek() != '<') {
        const SourceLocation at = here();
        std::string chunk = read_text();
        if (!stack.empty()) {
          stack.back()->text += chunk;
        } else if (!trim(chunk).empty()) {
          throw ParseError(at, "text outside of any element");
        }
        continue;
      }
      if (starts_with("<?")) {
        skip_past("?>");
      } else if (starts_with("<!--")) {
        skip_past("-->");
      } else if (starts_with("<![CDATA[")) {
        const SourceLocation at = here();
        advance(9);
        const auto end = text_.find("]]>", pos_);
        if (end == std::string_view::npos) throw ParseError(at, "unterminated CDATA section");
        if (!stack.empty()) stack.back()->text += std::string(text_.substr(pos_, end - pos_));
        advance(end + 3 - pos_);
      } else if (starts_with("<!")) {
        skip_declaration();
      } else if (starts_with("</")) {
        const SourceLocation at = here();
        advance(2);
        const std::string name = read_name();
        skip_space();
        expect('>');
        if (stack.empty()) throw ParseError(at, "unexpected closing tag </" + name + ">");
        if (stack.back()->name != name) {
          throw ParseError(at, "closing tag </" + name + "> does not match <" + stack.back()->name + ">");
        }
        stack.pop_back();
      } else {
        auto element = read_start_tag();
        Element* raw = element.get();
        const bool open = !self_closed_;
        if (stack.empty()) {
          roots.push_back(std::move(element));
        } else {
          stack.back()->children.push_back(std::move(element));
        }
        if (open) stack.push_back(raw);
      }
    }
    if (!stack.empty()) throw ParseError(stack.back()->where, "element <" + stack.back()->name + "> is never closed");
    return roots;
  }

 private:
  char peek() const { return pos_ < text_.size() ? text_[pos_] : '\0'; }
  bool starts_with(std::string_view s) const { return text_.substr(pos_, s.size()) == s; }
  SourceLocation here() const { return {line_, column_}; }

  void advance(std::size_t n) {
    for (std::size_t k = 0; k < n && pos_ < text_.size(); ++k, ++pos_) {
      if (text_[pos_] == '\n') {
        ++line_;
        column_ = 1;
      } else {
        ++column_;
      }
    }
  }

  void skip_space() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) advance(1);
  }

  void skip_past(std::string_view terminator) {
    const SourceLocation at = here();
    const auto end = text_.find(terminator, pos_);
    if (end == std::string_view::npos) throw ParseError(at, "missing '" + std::string(terminator) + "'");
    advance(end + terminator.size() - pos_);
  }

  // Skips a <!...> declaration. Internal general entities declared in a
  // DOCTYPE subset (<!ENTITY name "value">) are remembered for decode().
  void skip_declaration() {
    const SourceLocation at = here();
    const std::size_t start = pos_;
    int depth = 0;
    char quote = '\0';
    while (pos_ < text_.size()) {
      const char c = peek();
      advance(1);
      if (quote != '\0') {
        if (c == quote) quote = '\0';
        continue;
      }
      if (c == '"' || c == '\'') {
        if (depth > 1) quote = c;
        continue;
      }
      if (c == '<') ++depth;
      if (c == '>' && --depth == 0) {
        collect_entities(text_.substr(start, pos_ - start), at);
        return;
      }
    }
    throw ParseError(at, "unterminated declaration");
  }

  void collect_entities(std::string_view decl, SourceLocation at) {
    static const std::regex kEntity(R"re(<!ENTITY\s+([A-Za-z_][\w.\-]*)\s+("([^"]*)"|'([^']*)')\s*>)re");
    const std::string text(decl);
    for (std::sregex_iterator it(text.begin(), text.end(), kEntity), end; it != end; ++it) {
      const std::string raw = (*it)[3].matched ? (*it)[3].str() : (*it)[4].str();
      entities_.emplace((*it)[1].str(), decode(raw, at));
    }
  }

  void expect(char c) {
    if (peek() != c) {
      throw ParseError(here(), std::string("expected '") + c + "'" + (pos_ < text_.size() ? "" : " before end of input"));
    }
    advance(1);
  }

  std::string read_name() {
    const SourceLocation at = here();
    const std::size_t start = pos_;
    while (pos_ < text_.size()) {
      const char c = text_[pos_];
      if (std::isalnum(static_cast<unsigned char>(c)) || c == ':' || c == '_' || c == '-' || c == '.') {
        advance(1);
      } else {
        break;
      }
    }
    if (pos_ == start) throw ParseError(at, "expected a name");
    return std::string(text_.substr(start, pos_ - start));
  }

  std::string decode(std::string_view raw, SourceLocation at) const {
    std::string out;
    for (std::size_t i = 0; i < raw.size(); ++i) {
      if (raw[i] != '&') {
        out += raw[i];
        continue;
      }
      const auto semi = raw.find(';', i);
      if (semi == std::string_view::npos) throw ParseError(at, "unterminated entity reference");
      const std::string_view entity = raw.substr(i + 1, semi - i - 1);
      if (entity == "amp") out += '&';
      else if (entity == "lt") out += '<';
      else if (entity == "gt") out += '>';
      else if (entity == "quot") out += '"';
      else if (entity == "apos") out += '\'';
      else if (auto found = entities_.find(entity); found != entities_.end()) out += found->second;
      else if (!entity.empty() && entity[0] == '#') {
        const bool hex = entity.size() > 1 && (entity[1] == 'x' || entity[1] == 'X');
        const std::string_view digits = entity.substr(hex ? 2 : 1);
        unsigned long code = 0;
        const auto [ptr, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), code, hex ? 16 : 10);
        if (ec != std::errc() || ptr != digits.data() + digits.size()) {
          throw ParseError(at, "bad character reference '&" + std::string(entity) + ";'");
        }
        if (code < 0x80) out += static_cast<char>(code);
        else out += '?';
      } else {
        throw ParseError(at, "unknown entity '&" + std::string(entity) + ";'");
      }
      i = semi;
    }
    return out;
  }

  std::string read_text() {
    const SourceLocation at = here();
    const auto end = std::min(text_.find('<', pos_), text_.size());
    const std::string_view raw = text_.substr(pos_, end - pos_);
    advance(end - pos_);
    return decode(raw, at);
  }

  std::unique_ptr<Element> read_start_tag() {
    auto element = std::make_unique<Element>();
    element->where = here();
    advance(1);
    element->name = read_name();
    self_closed_ = false;
    while (true) {
      skip_space();
      if (peek() == '/') {
        advance(1);
        expect('>');
        self_closed_ = true;
        return element;
      }
      if (peek() == '>') {
        advance(1);
        return element;
      }
      if (pos_ >= text_.size()) throw ParseError(element->where, "unterminated tag <" + element->name);
      std::string key = read_name();
      skip_space();
      expect('=');
      skip_space();
      const char quote = peek();
      if (quote != '"' && quote != '\'') throw ParseError(here(), "attribute value must be quoted");
      const SourceLocation at = here();
      advance(1);
      const auto end = text_.find(quote, pos_);
      if (end == std::string_view::npos) throw ParseError(at, "unterminated attribute value");
      std::string value = decode(text_.substr(pos_, end - pos_), at);
      advance(end + 1 - pos_);
      if (element->attribute(key) != nullptr) throw ParseError(at, "duplicate attribute '" + key + "'");
      element->attributes.emplace_back(std::move(key), std::move(value));
    }
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
  bool self_closed_ = false;
  std::map<std::string, std::string, std::less<>> entities_;
};

std::string local_name(std::string_view iri) {
  const auto cut = iri.find_last_of("#/");
  return std::string(cut == std::string_view::npos ? iri : iri.substr(cut + 1));
}

bool is_class_element(std::string_view name) {
  return name == "owl:Class" || name == "rdfs:Class" || name == "rdf:Description";
}

std::optional<std::string> class_name(const Element& e) {
  if (const auto* about = e.attribute("rdf:about")) return local_name(*about);
  if (const auto* id = e.attribute("rdf:ID")) return local_name(*id);
  return std::nullopt;
}

// Registers a class element and returns its name (nullopt for anonymous ones).
std::optional<std::string> visit_class(const Element& e, Taxonomy& tax) {
  auto name = class_name(e);
  if (name && name->empty()) throw ParseError(e.where, "class IRI has an empty local name");
  if (name) tax.add_class(*name);
  for (const auto& child : e.children) {
    if (child->name == "rdfs:subClassOf") {
      std::optional<std::string> parent;
      if (const auto* res = child->attribute("rdf:resource")) {
        parent = local_name(*res);
      } else {
        for (const auto& nested : child->children) {
          if (is_class_element(nested->name)) {
            if (auto p = visit_class(*nested, tax)) parent = p;
          }
        }
      }
      if (name && parent && !parent->empty()) tax.add_parent(*name, *parent);
    } else if (child->name == "rdfs:label") {
      const std::string label = trim(child->text);
      if (name && !label.empty()) tax.add_synonym(*name, label);
    } else if (is_class_element(child->name)) {
      visit_class(*child, tax);
    }
  }
  return name;
}

void visit(const Element& e, Taxonomy& tax) {
  if (is_class_element(e.name)) {
    visit_class(e, tax);
    return;
  }
  for (const auto& child : e.children) visit(*child, tax);
}

Taxonomy parse_rdf(std::string_view text) {
  XmlReader reader(text);
  const auto roots = reader.parse();
  Taxonomy tax;
  for (const auto& root : roots) visit(*root, tax);
  return tax;
}

}  // namespace

void Taxonomy::add_class(const std::string& name) {
  if (name.empty()) throw InvalidArgument("class name must not be empty");
  classes_.insert(name);
}

void Taxonomy::add_parent(const std::string& child, const std::string& parent) {
  add_class(child);
  add_class(parent);
  if (auto it = parent_.find(child); it != parent_.end()) {
    if (it->second == parent) return;
    throw InvalidArgument("class '" + child + "' has two parents: '" + it->second + "' and '" + parent + "'");
  }
  std::vector<std::string> path{child, parent};
  std::string cursor = parent;
  while (cursor != child) {
    auto it = parent_.find(cursor);
    if (it == parent_.end()) break;
    cursor = it->second;
    path.push_back(cursor);
  }
  if (cursor == child) {
    std::ostringstream cycle;
    for (std::size_t i = 0; i < path.size(); ++i) cycle << (i ? " -> " : "") << path[i];
    throw InvalidArgument("subclass cycle: " + cycle.str());
  }
  parent_.emplace(child, parent);
}

void Taxonomy::add_synonym(const std::string& name, const std::string& synonym) {
  add_class(name);
  synonyms_[name].insert(synonym);
}

bool Taxonomy::has_class(std::string_view name) const { return classes_.count(std::string(name)) > 0; }

std::optional<std::string> Taxonomy::parent_of(std::string_view name) const {
  auto it = parent_.find(name);
  if (it == parent_.end()) return std::nullopt;
  return it->second;
}

std::set<std::string> Taxonomy::synonyms_of(std::string_view name) const {
  auto it = synonyms_.find(name);
  return it == synonyms_.end() ? std::set<std::string>{} : it->second;
}

bool Taxonomy::is_subclass_of(std::string_view name, std::string_view ancestor) const {
  if (!has_class(name)) return false;
  std::string cursor(name);
  while (true) {
    if (cursor == ancestor) return true;
    auto it = parent_.find(cursor);
    if (it == parent_.end()) return false;
    cursor = it->second;
  }
}

bool Taxonomy::isa(std::string_view value, std::string_view class_expr) const {
  const std::string needle = lower(trim(value));
  if (needle.empty()) return false;

  std::vector<std::string> targets;
  std::istringstream words{std::string(class_expr)};
  std::string word;
  std::string current;
  while (words >> word) {
    if (word == "OR" || word == "or" || word == "||") {
      if (!current.empty()) targets.push_back(current);
      current.clear();
    } else {
      current += current.empty() ? word : " " + word;
    }
  }
  if (!current.empty()) targets.push_back(current);

  for (const auto& wanted : targets) {
    // Exact class name first, then a case-insensitive match.
    std::string target = wanted;
    if (!has_class(target)) {
      auto it = std::find_if(classes_.begin(), classes_.end(),
                             [&](const std::string& c) { return lower(c) == lower(wanted); });
      if (it == classes_.end()) continue;
      target = *it;
    }
    for (const auto& cls : classes_) {
      if (!is_subclass_of(cls, target)) continue;
      if (lower(cls) == needle) return true;
      for (const auto& syn : synonyms_of(cls)) {
        if (lower(syn) == needle) return true;
      }
    }
  }
  return false;
}

Taxonomy load_taxonomy(std::string_view document, TaxonomyFormat format) {
  return format == TaxonomyFormat::rdf_xml ? parse_rdf(document) : parse_lines(document);
}

TaxonomyFormat detect_taxonomy_format(std::string_view document) {
  const auto first = document.find_first_not_of(" \t\r\n");
  if (first != std::string_view::npos && document[first] == '<') return TaxonomyFormat::rdf_xml;
  return TaxonomyFormat::simple_lines;
}

}  // namespace spatial
