#include "dml/xml.hpp"

#include "support.hpp"

#include <gtest/gtest.h>

using namespace dml;

TEST(LoadXml, EntryElement)
{
	auto doc = loadXml(R"(<ENTRY ID="351782"><FORM ID="351783"/></ENTRY>)").document;
	EXPECT_EQ(doc.root().tag(), "ENTRY");
	EXPECT_EQ(doc.size(), 2u);
	EXPECT_TRUE(doc.contains("351782"));
	EXPECT_TRUE(doc.contains("351783"));
}

TEST(LoadXml, MinimalDocument)
{
	auto doc = loadXml(R"(<A ID="1"/>)").document;
	EXPECT_EQ(doc.size(), 1u);
	EXPECT_TRUE(doc.root().children().empty());
}

TEST(LoadXml, DuplicateIdNamesBothLocations)
{
	try
	{
		loadXml("<A ID=\"1\">\n<B ID=\"1\"/></A>", { "ID", MissingIdPolicy::Strict, "dup.xml" });
		FAIL() << "expected XmlError";
	}
	catch (const XmlError &ex)
	{
		std::string what = ex.what();
		EXPECT_NE(what.find("\"1\""), std::string::npos) << what;
		EXPECT_NE(what.find("dup.xml:1"), std::string::npos) << what;
		EXPECT_NE(what.find("dup.xml:2"), std::string::npos) << what;
	}
}

TEST(LoadXml, MissingIdStrict)
{
	EXPECT_THROW(loadXml(R"(<A ID="1"><B/></A>)"), XmlError);
}

TEST(LoadXml, MissingIdAssignSkipsTakenNumbers)
{
	auto result = loadXml(R"(<A ID="gen-1"><B/><C><D/></C></A>)", { "ID", MissingIdPolicy::Assign, "x.xml" });
	ASSERT_EQ(result.assigned.size(), 3u);
	EXPECT_EQ(result.assigned[0].id, "gen-2");
	EXPECT_EQ(result.assigned[0].tag, "B");
	EXPECT_EQ(result.assigned[1].id, "gen-3");
	EXPECT_EQ(result.assigned[2].id, "gen-4");
	EXPECT_EQ(result.document.find("gen-4")->tag(), "D");
}

TEST(LoadXml, ConfigurableIdAttribute)
{
	auto doc = loadXml(R"(<A key="1" ID="x"/>)", { "key" }).document;
	EXPECT_TRUE(doc.contains("1"));
	EXPECT_EQ(*doc.root().attribute("ID"), "x");
	EXPECT_EQ(serializeXml(doc), R"(<A key="1" ID="x"/>)");
}

TEST(LoadXml, MalformedInput)
{
	EXPECT_THROW(loadXml("<A ID=\"1\">"), XmlError);
	EXPECT_THROW(loadXml("<A ID=\"1\"/><B ID=\"2\"/>"), XmlError);
	EXPECT_THROW(loadXml(""), XmlError);
}

TEST(LoadXml, RejectsOtherEncodingsAndDoctype)
{
	EXPECT_THROW(loadXml(R"(<?xml version="1.0" encoding="ISO-8859-1"?><A ID="1"/>)"), XmlError);
	EXPECT_NO_THROW(loadXml(R"(<?xml version="1.0" encoding="UTF-8"?><A ID="1"/>)"));
	EXPECT_THROW(loadXml(R"(<!DOCTYPE A [<!ENTITY e "boom">]><A ID="1">&e;</A>)"), XmlError);
}

TEST(LoadXml, CdataFoldsIntoText)
{
	auto doc = loadXml(R"(<A ID="1">a<![CDATA[<b>]]>c<!-- gone --></A>)").document;
	EXPECT_EQ(doc.root().text(), "a<b>c");
	EXPECT_EQ(serializeXml(doc), R"(<A ID="1">a&lt;b&gt;c</A>)");
}

TEST(SerializeXml, EscapesMinimally)
{
	auto doc = loadXml(R"(<A ID="1" T="&quot;x&quot; &amp; 'y'">a&lt;b &amp; "c"</A>)").document;
	EXPECT_EQ(serializeXml(doc), R"(<A ID="1" T="&quot;x&quot; &amp; 'y'">a&lt;b &amp; "c"</A>)");
}

TEST(SerializeXml, IdFirst)
{
	auto doc = loadXml(R"(<SENSE N="3" ID="351794"/>)").document;
	EXPECT_EQ(serializeXml(doc), R"(<SENSE ID="351794" N="3"/>)");
}

TEST(SerializeXml, CanonicalInputIsAFixedPoint)
{
	std::string canonical = R"(<R ID="r" A="1"> lead <B ID="b">x&amp;y</B>	tail
<C ID="c"/></R>)";
	EXPECT_EQ(serializeXml(loadXml(canonical).document), canonical);
}

TEST(SerializeXml, ExampleContentSurvives)
{
	auto path = dmltest::fixtures() / "usage" / "before.xml";
	auto doc = loadXmlFile(path).document;
	auto again = loadXml(serializeXml(doc)).document;
	EXPECT_TRUE(treeEqual(doc, again));
	EXPECT_EQ(again.find("351784")->text(), "طرف");
	EXPECT_EQ(again.find("351785")->text(), "tür'fah");
	EXPECT_EQ(*again.find("351794")->attribute("N"), "3");
}

TEST(SerializeXml, PrettyIndentsOnlyElementContent)
{
	auto doc = loadXml(R"(<R ID="r"><A ID="a">text<B ID="b"/></A><C ID="c"/></R>)").document;
	EXPECT_EQ(serializeXml(doc, { true }), "<R ID=\"r\">\n  <A ID=\"a\">text<B ID=\"b\"/></A>\n  <C ID=\"c\"/>\n</R>\n");
}

TEST(SerializeXml, PrettyExampleLayout)
{
	auto doc = loadXmlFile(dmltest::fixtures() / "usage" / "before-compact.xml").document;
	auto pretty = serializeXml(doc, { true });
	auto reloaded = loadXml(pretty).document;
	EXPECT_TRUE(treeEqual(doc, reloaded, { true }));
	EXPECT_NE(pretty.find("\n  <SENSE ID=\"351794\" N=\"3\">\n    <USG ID=\"351795\" TYPE=\"time\">rare</USG>\n  </SENSE>"),
			  std::string::npos)
		<< pretty;
}

TEST(SerializeXml, ControlWhitespaceSurvivesRoundTrip)
{
	auto root = std::make_unique<Element>("A", "1");
	root->appendAttribute("T", "tab\there\nline\r");
	root->appendText("cr\r\nlf");
	Document doc(std::move(root));
	auto again = loadXml(serializeXml(doc)).document;
	EXPECT_TRUE(treeEqual(doc, again)) << serializeXml(doc);
}

TEST(SerializeXml, RandomRoundTrip)
{
	dmltest::Rng rng(5);
	for (int i = 0; i < 300; ++i)
	{
		auto doc = dmltest::randomDocument(rng);
		auto bytes = serializeXml(doc);
		auto again = loadXml(bytes).document;
		ASSERT_TRUE(treeEqual(doc, again)) << bytes << "\n" << *firstDifference(doc.root(), again.root());
		EXPECT_EQ(serializeXml(again), bytes);
	}
}

TEST(Files, MissingFileIsIoError)
{
	EXPECT_THROW(readFile("/nonexistent/dir/file.xml"), IoError);
	EXPECT_THROW(loadXmlFile("/nonexistent/dir/file.xml"), IoError);
}
