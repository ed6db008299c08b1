#include <cctype>

#include "falcon/ontology.hpp"

namespace falcon {

namespace {

constexpr std::string_view kFamilyTbox = R"(# Family ontology
Male SubClassOf Person
Female SubClassOf Person
(Male and Female) SubClassOf Nothing
Parent SubClassOf Person
Child SubClassOf Person
(Parent and Child) SubClassOf Nothing
Father SubClassOf Male
Boy SubClassOf Male
(Father and Boy) SubClassOf Nothing
Mother SubClassOf Female
Girl SubClassOf Female
(Mother and Girl) SubClassOf Nothing
Father SubClassOf Parent
Mother SubClassOf Parent
(Father and Mother) SubClassOf Nothing
Boy SubClassOf Child
Girl SubClassOf Child
(Boy and Girl) SubClassOf Nothing
(Female and Parent) SubClassOf Mother
(Male and Parent) SubClassOf Father
(Female and Child) SubClassOf Girl
(Male and Child) SubClassOf Boy
some hasChild.Person SubClassOf Parent
some hasParent.Person SubClassOf Child
Grandma SubClassOf Mother
)";

}  // namespace

Ontology builtin_family() {
  Ontology onto = parse_ontology(kFamilyTbox);
  // One named individual per concept name: a_child : Child, ...
  const auto concepts = onto.signature.concepts();
  for (const auto& c : concepts) {
    std::string ind = "a_";
    for (char ch : c) ind += static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
    onto.add(ConceptAssertion{name(c), ind});
  }
  return onto;
}

}  // namespace falcon
