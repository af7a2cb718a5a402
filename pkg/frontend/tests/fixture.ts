// Shared test fixture: the backend address and the corpus the global setup
// serves. Tests talk to a real service process, never to mocks, so the
// payload shapes exercised here are exactly the production wire contract.

export const TEST_PORT = 7891;
export const BASE_URL = `http://127.0.0.1:${TEST_PORT}`;

export const FIXTURE_DOCS = [
  {
    id: "d1",
    title: "Vocal learning in songbirds",
    authors: [{ full_name: "Ada Lovelace" }],
    venue: "Journal of Avian Neuroscience",
    year: 2021,
    abstract: "Birds learn songs. They imitate tutors.",
    sections: [
      {
        title: "Introduction",
        paragraphs: [
          ["Songbirds acquire song by imitation.", "Tutors shape the outcome."],
          ["Learning has a critical period."],
        ],
      },
      { title: "Methods", paragraphs: [["We recorded juvenile finches."]] },
    ],
  },
  {
    id: "d2",
    title: "Zebra finch song structure",
    authors: [{ full_name: "Richard Hahnloser" }, { full_name: "Grace Hopper" }],
    venue: "Acoustic Communication Letters",
    year: 2019,
    abstract: "Zebra finch song learning follows motifs. Syllables repeat in order.",
    sections: [
      {
        title: "Results",
        paragraphs: [
          ["Motifs repeat with stable timing.", "Juveniles copy tutor syllables."],
        ],
      },
    ],
  },
  {
    id: "d3",
    title: "Corvid problem solving",
    authors: [{ full_name: "Alan Turing" }],
    venue: "Animal Cognition Reports",
    year: null,
    abstract: "Corvids solve puzzles. Tools are used in sequence.",
    sections: [
      {
        title: "Results",
        paragraphs: [["Crows bend wires.", "New Caledonian crows excel."]],
      },
    ],
  },
];
