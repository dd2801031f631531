#pragma once

/// \file
/// Executing DML commands against a Document.

#include "dml/command.hpp"
#include "dml/document.hpp"

#include <functional>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

namespace dml
{

/// Variable bindings of one command set. A name is bound at most once.
class Env
{
  public:
	const NodeId *lookup(const std::string &name) const;
	/// throws CommandError when \a name is already bound
	void bind(const std::string &name, NodeId id);
	bool empty() const noexcept { return m_bindings.empty(); }
	std::size_t size() const noexcept { return m_bindings.size(); }

  private:
	std::unordered_map<std::string, NodeId> m_bindings;
};

/// Variable first, then document id. Throws CommandError for an unresolved token.
NodeId resolve(const Ref &ref, const Env &env, const Document &doc);

/// Ids a command touched: resolved refs followed by the ids it created.
struct ExecuteResult
{
	std::vector<NodeId> resolved;
	std::vector<NodeId> created;
	std::vector<std::string> warnings;
};

/// Run one command. Either it succeeds or it throws CommandError and the
/// document (and env) are unchanged.
ExecuteResult execute(const Command &cmd, Document &doc, Env &env);

enum class ApplyMode
{
	FailFast,
	Collect
};

struct Failure
{
	SourceLocation location;
	std::string command;
	std::string reason;
};

struct ApplyReport
{
	std::string setName;
	std::size_t commandsApplied = 0;
	std::map<std::string, std::size_t> perVerbCounts;
	std::vector<Failure> failures;
	std::vector<std::string> warnings;
};

/// thrown by applySet in FailFast mode; the document keeps the commands applied so far
class ApplyError : public Error
{
  public:
	ApplyError(Failure failure, ApplyReport partial)
		: Error(failure.location.str() + ": " + failure.reason + " [" + failure.command + "]")
		, m_failure(std::move(failure))
		, m_partial(std::move(partial))
	{
	}

	const Failure &failure() const noexcept { return m_failure; }
	const ApplyReport &partial() const noexcept { return m_partial; }

  private:
	Failure m_failure;
	ApplyReport m_partial;
};

struct ApplyOptions
{
	ApplyMode mode = ApplyMode::FailFast;
	/// called after every successful command
	std::function<void(const Command &, const ExecuteResult &)> observer;
};

ApplyReport applySet(const CommandSet &set, Document &doc, const ApplyOptions &options = {});

} // namespace dml
