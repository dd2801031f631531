#include "dml/command.hpp"
#include "overloaded.hpp"

#include <algorithm>
#include <cctype>
#include <string_view>

namespace dml
{

namespace
{

using detail::overloaded;

} // namespace

std::size_t CommandSet::commandCount() const
{
	return static_cast<std::size_t>(
		std::count_if(items.begin(), items.end(), [](const ScriptItem &i) { return std::holds_alternative<Command>(i); }));
}

std::string_view verbOf(const CommandBody &body)
{
	return std::visit(overloaded{
						  [](const CreateElement &) { return "CREATE"; },
						  [](const CreateTextElement &) { return "CREATE"; },
						  [](const CreateClone &) { return "CREATE"; },
						  [](const RemoveElement &) { return "REMOVE"; },
						  [](const RemoveText &) { return "REMOVE"; },
						  [](const RemoveAttribute &) { return "REMOVE"; },
						  [](const Retag &) { return "RETAG"; },
						  [](const MoveElement &) { return "MOVE"; },
						  [](const SetAttribute &) { return "SET"; },
						  [](const SetText &) { return "SET"; },
					  },
					  body);
}

std::string_view spellingOf(const CommandBody &body)
{
	return std::visit(overloaded{
						  [](const CreateElement &) { return "CREATE Element"; },
						  [](const CreateTextElement &) { return "CREATE TextElement"; },
						  [](const CreateClone &) { return "CREATE Clone"; },
						  [](const RemoveElement &) { return "REMOVE Element"; },
						  [](const RemoveText &) { return "REMOVE Text"; },
						  [](const RemoveAttribute &) { return "REMOVE Attribute"; },
						  [](const Retag &) { return "RETAG"; },
						  [](const MoveElement &) { return "MOVE Element"; },
						  [](const SetAttribute &) { return "SET Attribute"; },
						  [](const SetText &) { return "SET Text"; },
					  },
					  body);
}

std::vector<Ref *> refsOf(CommandBody &body)
{
	return std::visit(overloaded{
						  [](CreateElement &c) { return std::vector<Ref *>{ &c.anchor }; },
						  [](CreateTextElement &c) { return std::vector<Ref *>{ &c.anchor }; },
						  [](CreateClone &c) { return std::vector<Ref *>{ &c.source, &c.anchor }; },
						  [](MoveElement &c) { return std::vector<Ref *>{ &c.target, &c.anchor }; },
						  [](auto &c) { return std::vector<Ref *>{ &c.target }; },
					  },
					  body);
}

std::vector<const Ref *> refsOf(const CommandBody &body)
{
	auto refs = refsOf(const_cast<CommandBody &>(body));
	return { refs.begin(), refs.end() };
}

std::optional<std::string> *bindOf(CommandBody &body)
{
	return std::visit(overloaded{
						  [](CreateElement &c) -> std::optional<std::string> * { return &c.bind; },
						  [](CreateTextElement &c) -> std::optional<std::string> * { return &c.bind; },
						  [](CreateClone &c) -> std::optional<std::string> * { return &c.bind; },
						  [](auto &) -> std::optional<std::string> * { return nullptr; },
					  },
					  body);
}

const std::optional<std::string> *bindOf(const CommandBody &body)
{
	return bindOf(const_cast<CommandBody &>(body));
}

bool structurallyEqual(const CommandSet &a, const CommandSet &b)
{
	if (a.items.size() != b.items.size())
		return false;
	for (std::size_t i = 0; i < a.items.size(); ++i)
	{
		auto &x = a.items[i];
		auto &y = b.items[i];
		if (x.index() != y.index())
			return false;
		if (auto cx = std::get_if<Comment>(&x))
		{
			auto &cy = std::get<Comment>(y);
			if (cx->text != cy.text or cx->author != cy.author or cx->date != cy.date)
				return false;
		}
		else if (std::get<Command>(x).body != std::get<Command>(y).body)
			return false;
	}
	return true;
}

namespace
{

bool isDate(std::string_view s)
{
	// M/D/YYYY with 1-2 digit month and day, 2-4 digit year
	std::size_t fields[3] = { 0, 0, 0 };
	std::size_t field = 0;
	for (char c : s)
	{
		if (c == '/')
		{
			if (++field > 2)
				return false;
		}
		else if (std::isdigit(static_cast<unsigned char>(c)))
			++fields[field];
		else
			return false;
	}
	return field == 2 and fields[0] >= 1 and fields[0] <= 2 and fields[1] >= 1 and fields[1] <= 2 and fields[2] >= 2 and
		   fields[2] <= 4;
}

bool isAuthor(std::string_view s)
{
	if (s.empty() or not std::isalpha(static_cast<unsigned char>(s.front())))
		return false;
	return std::all_of(s.begin(), s.end(), [](char c) {
		return std::isalnum(static_cast<unsigned char>(c)) or c == '_' or c == '.' or c == '-';
	});
}

} // namespace

void parseCommentMetadata(Comment &c)
{
	c.author.reset();
	c.date.reset();

	std::string_view s(c.text);
	auto hash = s.find('#');
	if (hash == std::string_view::npos)
		return;
	s.remove_prefix(hash + 1);

	auto word = [&s]() {
		auto b = s.find_first_not_of(" \t");
		if (b == std::string_view::npos)
		{
			s = {};
			return std::string_view{};
		}
		s.remove_prefix(b);
		auto e = s.find_first_of(" \t");
		auto w = s.substr(0, e);
		s.remove_prefix(w.size());
		return w;
	};

	auto author = word();
	auto date = word();
	if (isAuthor(author) and isDate(date))
	{
		c.author = std::string(author);
		c.date = std::string(date);
	}
}

} // namespace dml
