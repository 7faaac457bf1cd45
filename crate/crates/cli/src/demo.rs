use std::io::{BufRead, Write};

use anyhow::{anyhow, Context};
use sqmeter_core::session::{CUSTOM_SLOTS, PREDEFINED_SLOTS, SLOT_COUNT};
use sqmeter_core::{verify_recovery, Engine, Session, SubmitStatus};

use crate::{read_line, rule_lines};

struct Io<'a> {
    input: &'a mut dyn BufRead,
    out: &'a mut dyn Write,
}

impl Io<'_> {
    fn ask(&mut self, prompt: &str) -> anyhow::Result<String> {
        write!(self.out, "{prompt}")?;
        self.out.flush()?;
        read_line(self.input)?.ok_or_else(|| anyhow!("input ended before the setup was finished"))
    }

    fn yes(&mut self, prompt: &str) -> anyhow::Result<bool> {
        let a = self.ask(prompt)?;
        Ok(matches!(a.trim().to_lowercase().as_str(), "y" | "yes"))
    }
}

pub fn run(engine: &Engine, threshold: u8, input: &mut dyn BufRead, out: &mut dyn Write) -> anyhow::Result<()> {
    let mut io = Io { input, out };
    let mut session = engine.create_session();

    writeln!(io.out, "Pick three questions from the list.")?;
    let questions = engine.catalog().questions();
    for (i, q) in questions.iter().enumerate() {
        writeln!(io.out, "  {:>2}. {}", i + 1, q.text)?;
    }
    for slot in PREDEFINED_SLOTS {
        loop {
            let pick = io.ask(&format!("question {slot} (number or id): "))?;
            let pick = pick.trim();
            let id = match pick.parse::<usize>() {
                Ok(n) if (1..=questions.len()).contains(&n) => questions[n - 1].id.clone(),
                _ => pick.to_owned(),
            };
            match engine.select_predefined(&mut session, slot, &id) {
                Ok(()) => break,
                Err(e) => writeln!(io.out, "  {e}")?,
            }
        }
    }
    writeln!(io.out, "Now write two questions of your own.")?;
    for slot in CUSTOM_SLOTS {
        loop {
            let text = io.ask(&format!("question {slot}: "))?;
            match engine.set_custom_question(&mut session, slot, &text) {
                Ok(()) => break,
                Err(e) => writeln!(io.out, "  {e}")?,
            }
        }
    }

    for slot in 1..=SLOT_COUNT as u8 {
        answer_slot(engine, &mut session, slot, &mut io)?;
    }

    let profile = engine
        .finalize(&mut session, threshold)
        .context("finalizing the profile")?;
    writeln!(io.out)?;
    writeln!(
        io.out,
        "Saved profile {}. Recovery needs {} of {} answers.",
        profile.profile_id, profile.recovery_threshold, SLOT_COUNT
    )?;
    for (i, e) in profile.entries.iter().enumerate() {
        let note = if e.weak_override { " (kept although weak)" } else { "" };
        writeln!(io.out, "  {}. {} [{}]{note}", i + 1, e.question, e.band_at_save)?;
    }

    if !io.yes("Try a recovery now? [y/N]: ")? {
        return Ok(());
    }
    let mut attempts: [Option<String>; SLOT_COUNT] = Default::default();
    for (i, e) in profile.entries.iter().enumerate() {
        let a = io.ask(&format!("{} ", e.question))?;
        attempts[i] = (!a.trim().is_empty()).then_some(a);
    }
    let outcome = verify_recovery(&profile, &attempts);
    writeln!(io.out, "{}", if outcome.granted { "Access granted." } else { "Access denied." })?;
    Ok(())
}

fn answer_slot(engine: &Engine, session: &mut Session, slot: u8, io: &mut Io<'_>) -> anyhow::Result<()> {
    let text = session
        .slot(slot)
        .and_then(|s| s.question())
        .map(|q| q.text.clone())
        .unwrap_or_default();
    writeln!(io.out)?;
    writeln!(io.out, "[{slot}] {text}")?;
    loop {
        let answer = io.ask("answer: ")?;
        let outcome = match engine.submit_answer(session, slot, &answer) {
            Ok(o) => o,
            Err(e) => {
                writeln!(io.out, "  {e}")?;
                continue;
            }
        };
        writeln!(io.out, "score {}/5, {}", outcome.report.score, outcome.effective_band)?;
        for line in rule_lines(&outcome.report.rules) {
            writeln!(io.out, "{line}")?;
        }
        if outcome.status == SubmitStatus::Accepted {
            return Ok(());
        }
        if let Some(cat) = &outcome.common_hit {
            writeln!(io.out, "This answer is on the {cat} list of common answers.")?;
        }
        if let Some(s) = &outcome.suggestion {
            writeln!(io.out, "A stronger answer you could remember: {}", s.answer)?;
            writeln!(io.out, "  {}", s.explanation)?;
        }
        if io.yes("Keep your weak answer anyway? [y/N]: ")? {
            engine.confirm_weak(session, slot, &answer)?;
            return Ok(());
        }
    }
}
