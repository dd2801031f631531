#include "dml/script.hpp"
#include "dml/xml.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace dml;

namespace
{

CommandBody parseOne(std::string_view line)
{
	auto set = parseScript(line, "t.dml");
	EXPECT_EQ(set.items.size(), 1u);
	return std::get<Command>(set.items.at(0)).body;
}

std::string parseError(std::string_view text, const std::string &name = "bad.dml")
{
	try
	{
		parseScript(text, name);
	}
	catch (const ParseError &ex)
	{
		return ex.what();
	}
	return "no error";
}

} // namespace

TEST(ParseScript, ExampleCreate)
{
	auto body = parseOne("CREATE element TRANS under 351794 T");
	EXPECT_EQ(body, CommandBody(CreateElement{ "TRANS", Relation::Under, { "351794" }, "T" }));
}

TEST(ParseScript, FusedRemoveAttribute)
{
	auto body = parseOne("REMOVEattribute 351795 TIME");
	EXPECT_EQ(body, CommandBody(RemoveAttribute{ { "351795" }, "TIME" }));
}

TEST(ParseScript, SetText)
{
	EXPECT_EQ(parseOne(R"(SET Text 42 "rarely")"), CommandBody(SetText{ { "42" }, "rarely" }));
}

TEST(ParseScript, AllForms)
{
	EXPECT_EQ(parseOne(R"(create textelement TR "a b" before 1 V)"), CommandBody(CreateTextElement{ "TR", "a b", Relation::Before, { "1" }, "V" }));
	EXPECT_EQ(parseOne("CREATE Clone 5 after 6"), CommandBody(CreateClone{ { "5" }, Relation::After, { "6" }, std::nullopt }));
	EXPECT_EQ(parseOne("REMOVE Element 5"), CommandBody(RemoveElement{ { "5" } }));
	EXPECT_EQ(parseOne("REMOVE Text 5"), CommandBody(RemoveText{ { "5" } }));
	EXPECT_EQ(parseOne("RETAG 351795 TR"), CommandBody(Retag{ { "351795" }, "TR" }));
	EXPECT_EQ(parseOne("MOVE Element 351795 FirstUnder T"), CommandBody(MoveElement{ { "351795" }, Relation::FirstUnder, { "T" } }));
	EXPECT_EQ(parseOne(R"(SET Attribute 5 LANG "ur")"), CommandBody(SetAttribute{ { "5" }, "LANG", "ur" }));
}

TEST(ParseScript, FusedAndSplitSpellingsAgree)
{
	const std::pair<const char *, const char *> pairs[] = {
		{ "REMOVEattribute 351795 TIME", "REMOVE Attribute 351795 TIME" },
		{ "CREATEelement TRANS under 351794 T", "CREATE Element TRANS under 351794 T" },
		{ "MOVEELEMENT 1 after 2", "move element 1 after 2" },
		{ "SETtext 1 \"x\"", "SET Text 1 \"x\"" },
		{ "CREATEtextelement A \"x\" under 1", "CREATE TextElement A \"x\" under 1" },
		{ "removeText 4", "REMOVE Text 4" },
	};
	for (auto &[fused, split] : pairs)
		EXPECT_EQ(parseOne(fused), parseOne(split)) << fused;
}

TEST(ParseScript, Escapes)
{
	EXPECT_EQ(parseOne(R"(SET Text 1 "q\"b\\n\n\tط")"), CommandBody(SetText{ { "1" }, "q\"b\\n\n\t\xd8\xb7" }));
}

TEST(ParseScript, CommentsAndLocations)
{
	auto text = "# ABC 5/27/2011 sense tagged as usage, retag\n"
				"CREATE element TRANS under 351794 T\n"
				"\n"
				"  # note\n"
				"RETAG 351795 TR\r\n";
	auto set = parseScript(text, "usage.dml");
	ASSERT_EQ(set.items.size(), 4u);
	auto &c = std::get<Comment>(set.items[0]);
	EXPECT_EQ(c.text, "# ABC 5/27/2011 sense tagged as usage, retag");
	EXPECT_EQ(c.author, "ABC");
	EXPECT_EQ(c.date, "5/27/2011");
	EXPECT_EQ(std::get<Command>(set.items[1]).location, (SourceLocation{ "usage.dml", 2 }));
	EXPECT_EQ(std::get<Comment>(set.items[2]).text, "  # note");
	EXPECT_FALSE(std::get<Comment>(set.items[2]).author);
	EXPECT_EQ(std::get<Command>(set.items[3]).location.line, 5u);
	EXPECT_EQ(set.commandCount(), 2u);
}

TEST(ParseScript, Errors)
{
	EXPECT_EQ(parseError("RETAG 351795"), "bad.dml:1: RETAG expects 2 arguments");
	EXPECT_EQ(parseError("\nFROB 1"), "bad.dml:2: unknown verb \"FROB\"");
	EXPECT_NE(parseError("REMOVE Thing 1").find("bad.dml:1: unknown object \"Thing\""), std::string::npos);
	EXPECT_NE(parseError(R"(SET Text 1 "open)").find("bad.dml:1: unterminated string"), std::string::npos);
	EXPECT_NE(parseError(R"(SET Text 1 "\q")").find("bad.dml:1: bad escape"), std::string::npos);
	EXPECT_NE(parseError(R"(SET Text 1 "\u12G4")").find("bad escape"), std::string::npos);
	EXPECT_EQ(parseError("RETAG 1 TR T"), "bad.dml:1: bind variable \"T\" is only allowed on CREATE commands");
	EXPECT_NE(parseError("MOVE Element 1 inside 2").find("unknown relation \"inside\""), std::string::npos);
	EXPECT_NE(parseError("RETAG 1 9TR").find("invalid tag name \"9TR\""), std::string::npos);
	EXPECT_NE(parseError("CREATE Element A under 1 9v").find("invalid variable name"), std::string::npos);
	EXPECT_NE(parseError("SET Text 1 bare").find("expected a quoted string"), std::string::npos);
	EXPECT_NE(parseError("CREATE Element A under").find("CREATE Element expects 3 or 4 arguments"), std::string::npos);
}

TEST(PrintScript, CanonicalCasing)
{
	auto set = parseScriptFile(dmltest::fixtures() / "usage" / "usage.dml");
	EXPECT_EQ(printScript(set), "# ABC 5/27/2011 sense tagged as usage, retag\n"
								"CREATE Element TRANS under 351794 T\n"
								"RETAG 351795 TR\n"
								"REMOVE Attribute 351795 TYPE\n"
								"MOVE Element 351795 under T\n");
}

TEST(PrintScript, EmptySet)
{
	EXPECT_EQ(printScript(CommandSet{}), "");
	EXPECT_EQ(parseScript("", "e.dml").items.size(), 0u);
}

TEST(PrintScript, Quote)
{
	EXPECT_EQ(quote("a\"b\\c\nd\te"), R"("a\"b\\c\nd\te")");
	EXPECT_EQ(quote("\x01"), R"("\u0001")");
	EXPECT_EQ(quote("طرف"), "\"طرف\"");
}

TEST(PrintScript, RandomRoundTrip)
{
	dmltest::Rng rng(17);
	for (int i = 0; i < 300; ++i)
	{
		auto set = dmltest::randomCommandSet(rng, 1 + rng() % 20);
		auto text = printScript(set);
		auto again = parseScript(text, "random");
		ASSERT_TRUE(structurallyEqual(set, again)) << text;
		EXPECT_EQ(printScript(again), text);
	}
}

TEST(ParseScript, PlaceholdersOnlyWhenEnabled)
{
	EXPECT_THROW(parseScript("CREATE Element A under 1 $NEW1", "r"), ParseError);
	auto set = parseScript("CREATE Element A under $PARENT $NEW1", "r", { true });
	auto &c = std::get<CreateElement>(std::get<Command>(set.items[0]).body);
	EXPECT_EQ(c.anchor.token, "$PARENT");
	EXPECT_EQ(c.bind, "$NEW1");
}
