#pragma once

// Bundled miniature CoNLL-2003-style corpus (IOB2 labels, four columns) so
// that the built-in source works without network access.

#include <string_view>

namespace seqlab::builtin {

struct BuiltinDataset {
  std::string_view name;
  std::string_view train;
  std::string_view val;
  std::string_view test;
};

inline constexpr std::string_view kMiniConllTrain = R"conll(-DOCSTART- -X- -X- O

EU NNP B-NP B-ORG
rejects NN I-NP O
German NNP B-NP B-MISC
call NN I-NP O
to NN I-NP O
boycott NN I-NP O
British NNP B-NP B-MISC
lamb NN I-NP O
. . O O

Peter NNP B-NP B-PER
Blackburn NNP I-NP I-PER

BRUSSELS NNP B-NP B-LOC
1996-08-22 NN I-NP O

The NN I-NP O
European NNP B-NP B-ORG
Commission NNP I-NP I-ORG
said NN I-NP O
on NN I-NP O
Thursday NN I-NP O
it NN I-NP O
disagreed NN I-NP O
with NN I-NP O
German NNP B-NP B-MISC
advice NN I-NP O
. . O O

Germany NNP B-NP B-LOC
's NN I-NP O
representative NN I-NP O
to NN I-NP O
the NN I-NP O
European NNP B-NP B-ORG
Union NNP I-NP I-ORG
's NN I-NP O
veterinary NN I-NP O
committee NN I-NP O
Werner NNP B-NP B-PER
Zwingmann NNP I-NP I-PER
said NN I-NP O
on NN I-NP O
Wednesday NN I-NP O
consumers NN I-NP O
should NN I-NP O
buy NN I-NP O
sheepmeat NN I-NP O
from NN I-NP O
countries NN I-NP O
other NN I-NP O
than NN I-NP O
Britain NNP B-NP B-LOC
. . O O

Fischler NNP B-NP B-PER
proposed NN I-NP O
EU-wide NNP B-NP B-MISC
measures NN I-NP O
after NN I-NP O
reports NN I-NP O
from NN I-NP O
Britain NNP B-NP B-LOC
and NN I-NP O
France NNP B-NP B-LOC
. . O O

Spanish NNP B-NP B-MISC
Farm NN I-NP O
Minister NN I-NP O
Loyola NNP B-NP B-PER
de NNP I-NP I-PER
Palacio NNP I-NP I-PER
had NN I-NP O
earlier NN I-NP O
accused NN I-NP O
Fischler NNP B-NP B-PER
at NN I-NP O
an NN I-NP O
EU NNP B-NP B-ORG
farm NN I-NP O
ministers NN I-NP O
' NN I-NP O
meeting NN I-NP O
. . O O

Rare NNP B-NP B-MISC
Hendrix NNP I-NP I-MISC
song NN I-NP O
draft NN I-NP O
sells NN I-NP O
for NN I-NP O
almost NN I-NP O
$ NN I-NP O
17,000 NN I-NP O
. . O O

LONDON NNP B-NP B-LOC
1996-08-22 NN I-NP O

A NN I-NP O
rare NN I-NP O
early NN I-NP O
handwritten NN I-NP O
draft NN I-NP O
of NN I-NP O
a NN I-NP O
song NN I-NP O
by NN I-NP O
U.S. NNP B-NP B-LOC
guitar NN I-NP O
legend NN I-NP O
Jimi NNP B-NP B-PER
Hendrix NNP I-NP I-PER
was NN I-NP O
sold NN I-NP O
for NN I-NP O
almost NN I-NP O
$ NN I-NP O
17,000 NN I-NP O
on NN I-NP O
Thursday NN I-NP O
. . O O

China NNP B-NP B-LOC
says NN I-NP O
Taiwan NNP B-NP B-LOC
spoils NN I-NP O
atmosphere NN I-NP O
for NN I-NP O
talks NN I-NP O
. . O O

Clinton NNP B-NP B-PER
Blair NNP B-NP B-PER
and NN I-NP O
Chirac NNP B-NP B-PER
met NN I-NP O
in NN I-NP O
Paris NNP B-NP B-LOC
. . O O

Shares NN I-NP O
in NN I-NP O
Deutsche NNP B-NP B-ORG
Bank NNP I-NP I-ORG
rose NN I-NP O
after NN I-NP O
the NN I-NP O
Bundesbank NNP B-NP B-ORG
report NN I-NP O
. . O O

New NNP B-NP B-LOC
York NNP I-NP I-LOC
Yankees NNP B-NP B-ORG
beat NN I-NP O
Boston NNP B-NP B-ORG
. . O O

Reuters NNP B-NP B-ORG
reported NN I-NP O
that NN I-NP O
Nelson NNP B-NP B-PER
Mandela NNP I-NP I-PER
visited NN I-NP O
the NN I-NP O
United NNP B-NP B-ORG
Nations NNP I-NP I-ORG
. . O O
)conll";

inline constexpr std::string_view kMiniConllVal = R"conll(-DOCSTART- -X- -X- O

The NN I-NP O
United NNP B-NP B-ORG
Nations NNP I-NP I-ORG
appealed NN I-NP O
for NN I-NP O
calm NN I-NP O
in NN I-NP O
Burundi NNP B-NP B-LOC
. . O O

Boris NNP B-NP B-PER
Yeltsin NNP I-NP I-PER
returned NN I-NP O
to NN I-NP O
Moscow NNP B-NP B-LOC
. . O O

Nothing NN I-NP O
happened NN I-NP O
today NN I-NP O
. . O O

The NN I-NP O
World NNP B-NP B-MISC
Cup NNP I-NP I-MISC
starts NN I-NP O
in NN I-NP O
June NN I-NP O
. . O O

Microsoft NNP B-NP B-ORG
and NN I-NP O
Apple NNP B-NP B-ORG
Computer NNP I-NP I-ORG
settled NN I-NP O
. . O O
)conll";

inline constexpr std::string_view kMiniConllTest = R"conll(-DOCSTART- -X- -X- O

SOCCER NN I-NP O
- - O O
JAPAN NNP B-NP B-LOC
GET NN I-NP O
LUCKY NN I-NP O
WIN NN I-NP O
, , O O
CHINA NNP B-NP B-PER
IN NN I-NP O
SURPRISE NN I-NP O
DEFEAT NN I-NP O
. . O O

Nadim NNP B-NP B-PER
Ladki NNP I-NP I-PER

AL-AIN NNP B-NP B-LOC
, , O O
United NNP B-NP B-LOC
Arab NNP I-NP I-LOC
Emirates NNP I-NP I-LOC
1996-12-06 NN I-NP O

Japan NNP B-NP B-LOC
began NN I-NP O
the NN I-NP O
defence NN I-NP O
of NN I-NP O
their NN I-NP O
Asian NNP B-NP B-MISC
Cup NNP I-NP I-MISC
title NN I-NP O
with NN I-NP O
a NN I-NP O
lucky NN I-NP O
2-1 NN I-NP O
win NN I-NP O
against NN I-NP O
Syria NNP B-NP B-LOC
. . O O

The NN I-NP O
United NNP B-NP B-ORG
Nations NNP I-NP I-ORG
and NN I-NP O
Amnesty NNP B-NP B-ORG
International NNP I-NP I-ORG
criticised NN I-NP O
Kofi NNP B-NP B-PER
Annan NNP I-NP I-PER
. . O O
)conll";

inline constexpr BuiltinDataset kDatasets[] = {
    {"mini-conll", kMiniConllTrain, kMiniConllVal, kMiniConllTest},
};

inline const BuiltinDataset* find(std::string_view name) {
  for (const auto& d : kDatasets)
    if (d.name == name) return &d;
  return nullptr;
}

}  // namespace seqlab::builtin
