#include "mailguard/scripted_backend.hpp"

#include "mailguard/context_format.hpp"
#include "mailguard/validator.hpp"

#include <algorithm>
#include <cctype>
#include <sstream>

namespace mailguard {

namespace {

constexpr std::string_view kTriggerOpen = "<<INJECT ";
constexpr std::string_view kTriggerClose = ">>";

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

std::string local_part(const std::string& address) {
  const auto at = address.find('@');
  return at == std::string::npos ? address : address.substr(0, at);
}

std::string replace_all(std::string text, std::string_view needle, std::string_view with) {
  std::size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), with);
    pos += with.size();
  }
  return text;
}

class ScriptedBackend final : public ModelBackend {
public:
  explicit ScriptedBackend(ScriptedModelRules rules) : rules_(rules) {}

  ModelTurn next_turn(const BackendRequest& request) override {
    const std::string visible = visible_text(request);

    if (auto trigger = find_first_trigger(visible)) {
      if (!already_attempted(request, trigger->to)) {
        return obey(*trigger, visible);
      }
    }

    if (advertised(request, "store_summary") && !completed(request, "store_summary")) {
      return store_summary_turn(request);
    }
    if (advertised(request, "get_pending_summary") &&
        !completed(request, "get_pending_summary")) {
      ModelTurn turn;
      turn.tool_calls.push_back({"get_pending_summary", {}, ""});
      return turn;
    }
    if (advertised(request, "store_result") && !completed(request, "store_result")) {
      const std::string summary = fetched_summary(request);
      ModelTurn turn;
      turn.tool_calls.push_back(
          {"store_result",
           {{"text", "Task complete. Processed summary of " +
                         std::to_string(summary.size()) + " characters."}},
           ""});
      return turn;
    }

    ModelTurn turn;
    turn.final_text = final_text(request);
    return turn;
  }

private:
  static std::string visible_text(const BackendRequest& request) {
    std::string text = request.visible_context;
    for (const auto& exchange : request.history) {
      text += "\n";
      text += exchange.result.payload;
    }
    return text;
  }

  static bool advertised(const BackendRequest& request, std::string_view tool) {
    return std::any_of(request.tools.begin(), request.tools.end(),
                       [&](const ToolSchema& schema) { return schema.name == tool; });
  }

  static bool completed(const BackendRequest& request, std::string_view tool) {
    return std::any_of(request.history.begin(), request.history.end(),
                       [&](const ToolExchange& exchange) {
                         return exchange.call.tool_name == tool &&
                                exchange.result.status == ToolStatus::ok;
                       });
  }

  static bool already_attempted(const BackendRequest& request, const std::string& to) {
    return std::any_of(request.history.begin(), request.history.end(),
                       [&](const ToolExchange& exchange) {
                         if (exchange.call.tool_name != "send_email") return false;
                         auto it = exchange.call.arguments.find("to");
                         return it != exchange.call.arguments.end() && it->second == to;
                       });
  }

  static std::string fetched_summary(const BackendRequest& request) {
    for (const auto& exchange : request.history) {
      if (exchange.call.tool_name == "get_pending_summary" &&
          exchange.result.status == ToolStatus::ok) {
        return exchange.result.payload;
      }
    }
    return "";
  }

  static ModelTurn obey(const TriggerDirective& trigger, const std::string& visible) {
    std::string body = trigger.body;
    if (body.find(kBudgetPlaceholder) != std::string::npos) {
      if (auto figure = extract_budget_figure(visible)) {
        body = replace_all(std::move(body), kBudgetPlaceholder, *figure);
      }
    }
    ModelTurn turn;
    turn.tool_calls.push_back(
        {"send_email", {{"to", trigger.to}, {"subject", "Re: your request"}, {"body", body}}, ""});
    return turn;
  }

  ModelTurn store_summary_turn(const BackendRequest& request) const {
    const auto emails = parse_email_context(request.visible_context);
    std::string text;
    if (rules_.summary_style == SummaryStyle::structured_json) {
      text = serialize_summary(digest_doc(emails));
    } else {
      text = free_form_digest(emails);
    }
    ModelTurn turn;
    turn.tool_calls.push_back({"store_summary", {{"text", std::move(text)}}, ""});
    return turn;
  }

  SummaryDoc digest_doc(const std::vector<ContextEmail>& emails) const {
    SummaryDoc doc;
    doc.sender = emails.empty() ? "" : local_part(emails.front().sender);
    doc.subject = "Inbox digest (" + std::to_string(emails.size()) + " messages)";
    doc.body_summary = topics_line(emails);
    if (rules_.verbatim_copy) {
      doc.body_summary += " Full contents: ";
      doc.body_summary += verbatim_contents(emails);
    }
    return doc;
  }

  std::string free_form_digest(const std::vector<ContextEmail>& emails) const {
    std::string text = "Summary of " + std::to_string(emails.size()) + " messages. ";
    text += topics_line(emails);
    if (rules_.verbatim_copy) {
      text += "\nFull contents:\n";
      text += verbatim_contents(emails);
    }
    return text;
  }

  static std::string topics_line(const std::vector<ContextEmail>& emails) {
    std::string line = "Topics: ";
    for (std::size_t i = 0; i < emails.size(); ++i) {
      if (i > 0) line += "; ";
      line += emails[i].subject;
    }
    line += ".";
    return line;
  }

  static std::string verbatim_contents(const std::vector<ContextEmail>& emails) {
    std::string text;
    for (const auto& email : emails) {
      text += "[" + email.sender + "] ";
      text += email.body;
      text += " ";
    }
    return text;
  }

  std::string final_text(const BackendRequest& request) const {
    const auto emails = parse_email_context(request.visible_context);
    if (!emails.empty()) {
      return "Summary of " + std::to_string(emails.size()) + " messages. " +
             topics_line(emails);
    }
    return "Done.";
  }

  ScriptedModelRules rules_;
};

} // namespace

std::optional<TriggerDirective> find_first_trigger(std::string_view text) {
  std::size_t search = 0;
  while (search < text.size()) {
    const std::size_t open = text.find(kTriggerOpen, search);
    if (open == std::string_view::npos) return std::nullopt;
    std::size_t pos = open + kTriggerOpen.size();
    search = open + 1; // resume point if this candidate does not parse

    if (text.compare(pos, 3, "to=") != 0) continue;
    pos += 3;
    const std::size_t addr_begin = pos;
    while (pos < text.size() && !is_space(text[pos])) ++pos;
    if (pos == addr_begin || pos >= text.size()) continue;
    std::string to(text.substr(addr_begin, pos - addr_begin));

    while (pos < text.size() && is_space(text[pos])) ++pos;
    if (text.compare(pos, 5, "body=") != 0) continue;
    pos += 5;
    const std::size_t close = text.find(kTriggerClose, pos);
    if (close == std::string_view::npos) continue;

    return TriggerDirective{std::move(to), std::string(text.substr(pos, close - pos))};
  }
  return std::nullopt;
}

std::string render_trigger(const TriggerDirective& directive) {
  return std::string(kTriggerOpen) + "to=" + directive.to + " body=" + directive.body +
         std::string(kTriggerClose);
}

std::optional<std::string> extract_budget_figure(std::string_view text) {
  const std::size_t at = text.find(kBudgetSentencePrefix);
  if (at == std::string_view::npos) return std::nullopt;
  std::size_t pos = at + std::string_view(kBudgetSentencePrefix).size();
  const std::size_t begin = pos;
  while (pos < text.size() && !is_space(text[pos])) ++pos;
  std::string figure(text.substr(begin, pos - begin));
  while (!figure.empty() && (figure.back() == '.' || figure.back() == ','))
    figure.pop_back();
  if (figure.empty()) return std::nullopt;
  return figure;
}

std::unique_ptr<ModelBackend> scripted_backend(ScriptedModelRules rules) {
  return std::make_unique<ScriptedBackend>(rules);
}

} // namespace mailguard
