#include "dml/interpreter.hpp"
#include "dml/script.hpp"
#include "overloaded.hpp"

namespace dml
{

using detail::overloaded;

const NodeId *Env::lookup(const std::string &name) const
{
	auto i = m_bindings.find(name);
	return i == m_bindings.end() ? nullptr : &i->second;
}

void Env::bind(const std::string &name, NodeId id)
{
	if (not m_bindings.emplace(name, std::move(id)).second)
		throw CommandError("variable \"" + name + "\" is already bound");
}

NodeId resolve(const Ref &ref, const Env &env, const Document &doc)
{
	if (auto id = env.lookup(ref.token))
		return *id;
	if (doc.contains(ref.token))
		return ref.token;
	throw CommandError("unresolved reference \"" + ref.token + "\"");
}

namespace
{

class Executor
{
  public:
	Executor(Document &doc, Env &env)
		: m_doc(doc)
		, m_env(env)
	{
	}

	Element &element(const Ref &ref)
	{
		auto id = resolve(ref, m_env, m_doc);
		m_result.resolved.push_back(id);
		auto e = m_doc.find(id);
		if (e == nullptr)
			throw CommandError("variable \"" + ref.token + "\" refers to \"" + id + "\", which no longer exists");
		return *e;
	}

	void checkBind(const std::optional<std::string> &bind)
	{
		if (not bind)
			return;
		if (m_env.lookup(*bind))
			throw CommandError("variable \"" + *bind + "\" is already bound");
		if (m_doc.contains(*bind))
			m_result.warnings.push_back("variable \"" + *bind + "\" shadows an existing id");
	}

	void checkPlacement(const Element &anchor, Relation rel)
	{
		if ((rel == Relation::Before or rel == Relation::After) and anchor.parent() == nullptr)
			throw CommandError("relation " + std::string(toString(rel)) + " is not allowed with the root element \"" +
							   anchor.id() + "\" as anchor");
	}

	/// attach \a fresh per relation; binds and records ids
	void attach(std::unique_ptr<Element> fresh, Relation rel, Element &anchor, const std::optional<std::string> &bind)
	{
		auto &created = m_doc.insert(std::move(fresh), rel, anchor);
		if (bind)
			m_env.bind(*bind, created.id());
	}

	void operator()(const CreateElement &c)
	{
		auto &anchor = element(c.anchor);
		checkPlacement(anchor, c.relation);
		checkBind(c.bind);
		auto id = m_doc.allocateDerivedId(anchor.id());
		m_result.created.push_back(id);
		attach(std::make_unique<Element>(c.tag, id), c.relation, anchor, c.bind);
	}

	void operator()(const CreateTextElement &c)
	{
		auto &anchor = element(c.anchor);
		checkPlacement(anchor, c.relation);
		checkBind(c.bind);
		auto id = m_doc.allocateDerivedId(anchor.id());
		m_result.created.push_back(id);
		auto e = std::make_unique<Element>(c.tag, id);
		e->appendText(c.text);
		attach(std::move(e), c.relation, anchor, c.bind);
	}

	void operator()(const CreateClone &c)
	{
		auto &source = element(c.source);
		auto &anchor = element(c.anchor);
		checkPlacement(anchor, c.relation);
		checkBind(c.bind);
		attach(copy(source), c.relation, anchor, c.bind);
	}

	void operator()(const RemoveElement &c)
	{
		auto &target = element(c.target);
		m_doc.remove(target);
	}

	void operator()(const RemoveText &c)
	{
		m_doc.removeText(element(c.target));
	}

	void operator()(const RemoveAttribute &c)
	{
		m_doc.removeAttribute(element(c.target), c.attr);
	}

	void operator()(const Retag &c)
	{
		m_doc.setTag(element(c.target), c.tag);
	}

	void operator()(const MoveElement &c)
	{
		auto &target = element(c.target);
		auto &anchor = element(c.anchor);
		m_doc.move(target, c.relation, anchor);
	}

	void operator()(const SetAttribute &c)
	{
		m_doc.setAttribute(element(c.target), c.attr, c.value);
	}

	void operator()(const SetText &c)
	{
		m_doc.setText(element(c.target), c.text);
	}

	ExecuteResult take() { return std::move(m_result); }

	/// rollback of id reservations made by a command that then failed
	void releaseReservations()
	{
		for (auto &id : m_result.created)
			m_doc.releaseReservation(id);
	}

  private:
	// every cloned element derives its id from the element it was copied from
	std::unique_ptr<Element> copy(const Element &source)
	{
		auto id = m_doc.allocateDerivedId(source.id());
		m_result.created.push_back(id);
		auto result = std::make_unique<Element>(source.tag(), id);
		for (auto &[name, value] : source.attributes())
			result->appendAttribute(name, value);
		for (auto &n : source.children())
		{
			if (auto e = asElement(n))
				result->appendElement(copy(*e));
			else
				result->appendText(asText(n)->content);
		}
		return result;
	}

	Document &m_doc;
	Env &m_env;
	ExecuteResult m_result;
};

} // namespace

ExecuteResult execute(const Command &cmd, Document &doc, Env &env)
{
	Executor exec(doc, env);
	try
	{
		std::visit(exec, cmd.body);
	}
	catch (const CommandError &)
	{
		exec.releaseReservations();
		throw;
	}
	return exec.take();
}

ApplyReport applySet(const CommandSet &set, Document &doc, const ApplyOptions &options)
{
	ApplyReport report;
	report.setName = set.name;

	Env env;
	for (auto &item : set.items)
	{
		auto cmd = std::get_if<Command>(&item);
		if (cmd == nullptr)
			continue;

		try
		{
			auto result = execute(*cmd, doc, env);
			++report.commandsApplied;
			++report.perVerbCounts[std::string(verbOf(cmd->body))];
			for (auto &w : result.warnings)
				report.warnings.push_back(cmd->location.str() + ": " + w);
			if (options.observer)
				options.observer(*cmd, result);
		}
		catch (const CommandError &ex)
		{
			Failure failure{ cmd->location, printCommand(cmd->body), ex.what() };
			if (options.mode == ApplyMode::FailFast)
				throw ApplyError(std::move(failure), std::move(report));
			report.failures.push_back(std::move(failure));
		}
	}
	return report;
}

} // namespace dml
