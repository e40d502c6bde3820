#include "ragattr/prompt.hpp"

#include "ragattr/errors.hpp"

namespace ragattr {

namespace {

struct PromptTemplate {
  std::string_view id;
  std::string_view header;
  std::string_view doc_open;  // followed by the ordinal
  std::string_view doc_close;
  std::string_view question;
  std::string_view footer;
};

constexpr PromptTemplate kTemplates[] = {
    {"default",
     "Answer the question using the documents provided below. If they do not contain the answer, "
     "answer from your own knowledge.\n\n",
     "--- Document ", " ---\n", "Question: ", "\nAnswer:"},
    {"bare", "", "[", "]\n", "", "\n"},
};

const PromptTemplate& find_template(std::string_view id) {
  for (const auto& t : kTemplates) {
    if (t.id == id) return t;
  }
  throw ConfigError("unknown prompt template '" + std::string(id) + "'");
}

}  // namespace

const std::vector<std::string>& prompt_template_ids() {
  static const std::vector<std::string> ids = [] {
    std::vector<std::string> out;
    for (const auto& t : kTemplates) out.emplace_back(t.id);
    return out;
  }();
  return ids;
}

std::string build_prompt(const QueryCase& c, CoalitionMask coalition, std::string_view template_id) {
  const PromptTemplate& t = find_template(template_id);
  if (coalition.n() != c.n()) throw BoundsError("coalition width does not match document count");

  std::string out(t.header);
  for (int i : coalition.members()) {
    out += t.doc_open;
    out += std::to_string(i + 1);
    out += t.doc_close;
    out += c.documents[static_cast<std::size_t>(i)].text;
    out += "\n\n";
  }
  out += t.question;
  out += c.query;
  out += t.footer;
  return out;
}

}  // namespace ragattr
